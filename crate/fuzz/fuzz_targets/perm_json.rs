#![no_main]

use libfuzzer_sys::fuzz_target;
use trap_core::Permutation;

fuzz_target!(|text: &str| {
    let Ok(p) = serde_json::from_str::<Permutation>(text) else { return };
    assert_eq!(p.compose(&p.inverse()).unwrap(), Permutation::identity(p.degree()));
    let back: Permutation = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(back, p);
});
