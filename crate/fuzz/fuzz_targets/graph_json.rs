#![no_main]

use libfuzzer_sys::fuzz_target;
use trap_core::dsl::json::{graph_from_json, graph_to_json};
use trap_core::dsl::Decoration;
use trap_core::graph::iso_eq;
use trap_core::Graph;

fuzz_target!(|text: &str| {
    let Ok(g) = graph_from_json::<Decoration>(text) else { return };
    let back: Graph<Decoration> = graph_from_json(&graph_to_json(&g)).expect("serialized graphs load");
    assert!(iso_eq(&back, &g));
    let (k, l) = g.arity();
    if k > 0 && l > 0 {
        g.partial_trace(1, 1).expect("valid trace indices");
    }
});
