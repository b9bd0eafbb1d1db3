//! Substitution of graphs into the vertices of a graph, and its unit.

use super::{Edge, Graph, Head, Tail, Vertex};
use crate::error::{Result, TrapError};

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Flattens a graph whose vertices carry graphs: the `a`-th incoming edge of
/// `v` is identified with input `a` of its graph, likewise for outputs.
pub fn substitute<D: Clone>(g: &Graph<Graph<D>>) -> Result<Graph<D>> {
    let ne = g.edges().len();
    let mut offsets = Vec::with_capacity(g.vertices().len());
    let mut vertex_offsets = Vec::with_capacity(g.vertices().len());
    let mut total = ne;
    let mut total_vertices = 0;
    for (v, vert) in g.vertices().iter().enumerate() {
        let inner = &vert.decoration;
        if inner.arity() != vert.arity() {
            return Err(TrapError::ArityMismatch(format!(
                "vertex {v} has arity {:?} but its graph has arity {:?}",
                vert.arity(),
                inner.arity()
            )));
        }
        offsets.push(total);
        vertex_offsets.push(total_vertices);
        total += inner.edges().len();
        total_vertices += inner.vertices().len();
    }

    let mut uf = UnionFind::new(total);
    let mut tails: Vec<Option<Tail>> = vec![None; total];
    let mut heads: Vec<Option<Head>> = vec![None; total];
    for (e, edge) in g.edges().iter().enumerate() {
        if let Some(Tail::Input(i)) = edge.tail() {
            tails[e] = Some(Tail::Input(i));
        }
        if let Some(Head::Output(j)) = edge.head() {
            heads[e] = Some(Head::Output(j));
        }
    }
    for (v, vert) in g.vertices().iter().enumerate() {
        let inner = &vert.decoration;
        let off = offsets[v];
        let voff = vertex_offsets[v];
        for (f, edge) in inner.edges().iter().enumerate() {
            match edge.tail() {
                Some(Tail::Vertex(w)) => tails[off + f] = Some(Tail::Vertex(voff + w)),
                Some(Tail::Input(a)) => uf.union(vert.ins[a - 1], off + f),
                None => {}
            }
            match edge.head() {
                Some(Head::Vertex(w)) => heads[off + f] = Some(Head::Vertex(voff + w)),
                Some(Head::Output(b)) => uf.union(vert.outs[b - 1], off + f),
                None => {}
            }
        }
    }

    let mut class_of_root = vec![usize::MAX; total];
    let mut class_tail: Vec<Option<Tail>> = Vec::new();
    let mut class_head: Vec<Option<Head>> = Vec::new();
    let mut class = vec![0; total];
    for x in 0..total {
        let r = uf.find(x);
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = class_tail.len();
            class_tail.push(None);
            class_head.push(None);
        }
        let c = class_of_root[r];
        class[x] = c;
        if let Some(t) = tails[x] {
            class_tail[c] = Some(t);
        }
        if let Some(h) = heads[x] {
            class_head[c] = Some(h);
        }
    }
    let edges = class_tail
        .into_iter()
        .zip(class_head)
        .map(|pair| match pair {
            (Some(tail), Some(head)) => Ok(Edge::Link { tail, head }),
            (None, None) => Ok(Edge::Loop),
            _ => Err(TrapError::InvalidGraph("substitution left a dangling edge".into())),
        })
        .collect::<Result<Vec<_>>>()?;

    let mut vertices = Vec::with_capacity(total_vertices);
    for (v, vert) in g.vertices().iter().enumerate() {
        let off = offsets[v];
        for w in vert.decoration.vertices() {
            vertices.push(Vertex {
                decoration: w.decoration.clone(),
                ins: w.ins.iter().map(|&f| class[off + f]).collect(),
                outs: w.outs.iter().map(|&f| class[off + f]).collect(),
            });
        }
    }
    Graph::from_parts(vertices, edges)
}

/// Decorates every vertex by the corolla of its own decoration.
pub fn nu<D: Clone>(g: &Graph<D>) -> Graph<Graph<D>> {
    Graph {
        vertices: g
            .vertices
            .iter()
            .map(|v| Vertex {
                decoration: Graph::corolla(v.decoration.clone(), v.ins.len(), v.outs.len()),
                ins: v.ins.clone(),
                outs: v.outs.clone(),
            })
            .collect(),
        edges: g.edges.clone(),
        k: g.k,
        l: g.l,
    }
}
