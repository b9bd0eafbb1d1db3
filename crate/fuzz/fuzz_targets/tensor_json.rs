#![no_main]

use libfuzzer_sys::fuzz_target;
use trap_core::homv::{DenseTensor, HomV};
use trap_core::Trap;

fuzz_target!(|text: &str| {
    let Ok(t) = serde_json::from_str::<DenseTensor>(text) else { return };
    let b = HomV::<f64>::new(t.dim());
    let (k, l) = t.arity();
    if k > 0 && l > 0 && t.data().len() <= 1 << 16 {
        b.partial_trace(&t, 1, 1).expect("valid trace indices");
    }
    let back: DenseTensor = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
    assert_eq!(back.arity(), t.arity());
});
