//! JSON form of graphs:
//! `{vertices:[{id,decoration,in_slots,out_slots}], edges:[{id,kind,source?,target?,in_index?,out_index?}]}`.

use std::collections::HashMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrapError};
use crate::graph::{Edge, EdgeKind, Graph, Head, Tail, Vertex};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson<D> {
    vertices: Vec<VertexJson<D>>,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexJson<D> {
    id: u64,
    decoration: D,
    in_slots: Vec<u64>,
    out_slots: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeJson {
    id: u64,
    kind: EdgeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    in_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out_index: Option<usize>,
}

fn to_repr<D: Clone>(g: &Graph<D>) -> GraphJson<D> {
    let vertices = g
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, vert)| VertexJson {
            id: v as u64,
            decoration: vert.decoration.clone(),
            in_slots: vert.ins.iter().map(|&e| e as u64).collect(),
            out_slots: vert.outs.iter().map(|&e| e as u64).collect(),
        })
        .collect();
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| EdgeJson {
            id: e as u64,
            kind: edge.kind(),
            source: edge.source().map(|v| v as u64),
            target: edge.target().map(|v| v as u64),
            in_index: edge.in_index(),
            out_index: edge.out_index(),
        })
        .collect();
    GraphJson { vertices, edges }
}

pub fn graph_to_value<D: Clone + Serialize>(g: &Graph<D>) -> serde_json::Value {
    serde_json::to_value(to_repr(g)).expect("graphs serialize")
}

pub fn graph_to_json<D: Clone + Serialize>(g: &Graph<D>) -> String {
    serde_json::to_string_pretty(&to_repr(g)).expect("graphs serialize")
}

pub fn graph_from_value<D: DeserializeOwned>(value: serde_json::Value) -> Result<Graph<D>> {
    let repr: GraphJson<D> = serde_json::from_value(value).map_err(|e| TrapError::InvalidData(e.to_string()))?;
    from_repr(repr)
}

pub fn graph_from_json<D: DeserializeOwned>(text: &str) -> Result<Graph<D>> {
    let repr: GraphJson<D> = serde_json::from_str(text).map_err(|e| TrapError::InvalidData(e.to_string()))?;
    from_repr(repr)
}

fn from_repr<D>(repr: GraphJson<D>) -> Result<Graph<D>> {
    let bad = |m: String| TrapError::InvalidGraph(m);
    let mut vid = HashMap::new();
    for (i, v) in repr.vertices.iter().enumerate() {
        if vid.insert(v.id, i).is_some() {
            return Err(bad(format!("duplicate vertex id {}", v.id)));
        }
    }
    let mut eid = HashMap::new();
    for (i, e) in repr.edges.iter().enumerate() {
        if eid.insert(e.id, i).is_some() {
            return Err(bad(format!("duplicate edge id {}", e.id)));
        }
    }
    let vertex = |id: Option<u64>, what: &str, e: u64| -> Result<usize> {
        let id = id.ok_or_else(|| bad(format!("edge {e} lacks its {what}")))?;
        vid.get(&id).copied().ok_or(TrapError::UnknownVertex(id as usize))
    };
    let mut edges = Vec::with_capacity(repr.edges.len());
    for e in &repr.edges {
        let expect = |present: bool, field: &Option<u64>, name: &str| -> Result<()> {
            if field.is_some() != present {
                return Err(bad(format!("edge {} of kind {:?} has wrong {name}", e.id, e.kind)));
            }
            Ok(())
        };
        let expect_idx = |present: bool, field: &Option<usize>, name: &str| -> Result<()> {
            if field.is_some() != present {
                return Err(bad(format!("edge {} of kind {:?} has wrong {name}", e.id, e.kind)));
            }
            Ok(())
        };
        let (has_src, has_tgt, has_in, has_out) = match e.kind {
            EdgeKind::Internal => (true, true, false, false),
            EdgeKind::Input => (false, true, true, false),
            EdgeKind::Output => (true, false, false, true),
            EdgeKind::Io => (false, false, true, true),
            EdgeKind::Loop => (false, false, false, false),
        };
        expect(has_src, &e.source, "source")?;
        expect(has_tgt, &e.target, "target")?;
        expect_idx(has_in, &e.in_index, "in_index")?;
        expect_idx(has_out, &e.out_index, "out_index")?;
        let edge = if e.kind == EdgeKind::Loop {
            Edge::Loop
        } else {
            let tail = match e.in_index {
                Some(i) => Tail::Input(i),
                None => Tail::Vertex(vertex(e.source, "source", e.id)?),
            };
            let head = match e.out_index {
                Some(j) => Head::Output(j),
                None => Head::Vertex(vertex(e.target, "target", e.id)?),
            };
            Edge::Link { tail, head }
        };
        edges.push(edge);
    }
    let slot = |id: &u64| eid.get(id).copied().ok_or_else(|| bad(format!("unknown edge id {id}")));
    let mut vertices = Vec::with_capacity(repr.vertices.len());
    for v in repr.vertices {
        vertices.push(Vertex {
            ins: v.in_slots.iter().map(slot).collect::<Result<_>>()?,
            outs: v.out_slots.iter().map(slot).collect::<Result<_>>()?,
            decoration: v.decoration,
        });
    }
    Graph::from_parts(vertices, edges)
}
