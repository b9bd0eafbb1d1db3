#![no_main]

use libfuzzer_sys::fuzz_target;
use trap_core::dsl::{parse, unparse, unparse_graph};
use trap_core::kernel::TorusGrid;

fuzz_target!(|text: &str| {
    let Ok(doc) = parse(text) else { return };
    let again = parse(&unparse(&doc)).expect("unparsed documents parse");
    assert_eq!(again, doc);
    if let Ok(g) = doc.graph() {
        let back = parse(&unparse_graph(&g, doc.backend)).unwrap().graph().unwrap();
        assert_eq!(back.arity(), g.arity());
    }
    let _ = doc.label_graph();
    let _ = doc.homv_graph(2, 0);
    let _ = doc.kernel_graph(TorusGrid::new(5, 1).unwrap(), 0);
});
