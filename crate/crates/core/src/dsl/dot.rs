//! Graphviz export. Vertices are record nodes whose ports `i1, i2, …` and
//! `o1, o2, …` follow slot order; global inputs, outputs and loops are
//! small point-like nodes.

use std::fmt::Write as _;

use crate::graph::{Edge, Graph, Head, Tail};

fn escape(s: &str) -> String {
    s.chars()
        .flat_map(|c| match c {
            '"' | '\\' | '{' | '}' | '|' | '<' | '>' => vec!['\\', c],
            '\n' => vec!['\\', 'n'],
            c => vec![c],
        })
        .collect()
}

/// Renders `g` in DOT, labelling vertex `v` with `label(v, decoration)`.
pub fn to_dot<D>(g: &Graph<D>, label: impl Fn(usize, &D) -> String) -> String {
    let mut out = String::from("digraph trap {\n  rankdir=TB;\n  node [fontname=\"monospace\"];\n");
    for (v, vert) in g.vertices().iter().enumerate() {
        let ports = |prefix: char, n: usize| (1..=n).map(|s| format!("<{prefix}{s}> {s}")).collect::<Vec<_>>().join("|");
        writeln!(
            out,
            "  v{v} [shape=record, label=\"{{{{{}}}|{}|{{{}}}}}\"];",
            ports('i', vert.ins.len()),
            escape(&label(v, &vert.decoration)),
            ports('o', vert.outs.len())
        )
        .unwrap();
    }
    let (k, l) = g.arity();
    for i in 1..=k {
        writeln!(out, "  in{i} [shape=invtriangle, label=\"in {i}\"];").unwrap();
    }
    for j in 1..=l {
        writeln!(out, "  out{j} [shape=triangle, label=\"out {j}\"];").unwrap();
    }
    for (e, edge) in g.edges().iter().enumerate() {
        match edge {
            Edge::Loop => {
                writeln!(out, "  loop{e} [shape=circle, label=\"\", width=0.2];").unwrap();
                writeln!(out, "  loop{e} -> loop{e} [label=\"e{e}\"];").unwrap();
            }
            Edge::Link { tail, head } => {
                let from = match tail {
                    Tail::Input(i) => format!("in{i}"),
                    Tail::Vertex(v) => format!("v{v}:o{}:s", g.out_slot_of(e).map_or(0, |(_, s)| s + 1)),
                };
                let to = match head {
                    Head::Output(j) => format!("out{j}"),
                    Head::Vertex(v) => format!("v{v}:i{}:n", g.in_slot_of(e).map_or(0, |(_, s)| s + 1)),
                };
                writeln!(out, "  {from} -> {to} [label=\"e{e}\"];").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}
