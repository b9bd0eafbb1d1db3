#![no_main]

use libfuzzer_sys::fuzz_target;
use trap_core::homv::HomV;
use trap_core::upgr::UTrap;
use trap_core::Trap;

fuzz_target!(|text: &str| {
    let Ok(value) = serde_json::from_str(text) else { return };
    let u = UTrap::new(HomV::<f64>::new(2));
    let Ok(p) = u.from_value(value) else { return };
    let (k, l) = u.arity(&p);
    if k > 0 && l > 0 && k + l <= 12 {
        u.partial_trace(&p, 1, 1).expect("valid trace indices");
    }
});
