#![no_main]

use libfuzzer_sys::fuzz_target;
use trap_core::kernel::{GridKernel, KernelTrap};
use trap_core::Trap;

fuzz_target!(|text: &str| {
    let Ok(k) = serde_json::from_str::<GridKernel>(text) else { return };
    let b = KernelTrap::new(*k.grid());
    let (a, c) = k.arity();
    if a > 0 && c > 0 && k.samples().len() <= 1 << 16 {
        b.partial_trace(&k, 1, 1).expect("valid trace indices");
    }
    let back: GridKernel = serde_json::from_str(&serde_json::to_string(&k).unwrap()).unwrap();
    assert_eq!(back.arity(), k.arity());
});
