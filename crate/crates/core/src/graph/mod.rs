//! Corolla-ordered decorated graphs with indexed global inputs and outputs.
//!
//! Every edge has a tail (a vertex output slot or a global input) and a head
//! (a vertex input slot or a global output), except loops which have neither.
//! Input edges, output edges, internal edges and input-output edges are the
//! four combinations. Vertex and edge ids are positions and are renumbered by
//! every operation.

mod iso;
mod random;
mod solar;
mod subst;
mod trap;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{check_index, Result, TrapError};
use crate::perm::Permutation;

pub use iso::{canonical_form, canonical_form_by_key, iso_eq, iso_eq_by};
pub use random::{random_graph, RandomGraphOptions};
pub use solar::{is_solar, solar_decompose, SolarDecomposition};
pub use subst::{nu, substitute};
pub use trap::GraphTrap;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tail {
    Vertex(VertexId),
    Input(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Vertex(VertexId),
    Output(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    Link { tail: Tail, head: Head },
    Loop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Internal,
    Input,
    Output,
    Io,
    Loop,
}

impl Edge {
    pub fn kind(&self) -> EdgeKind {
        match self {
            Edge::Loop => EdgeKind::Loop,
            Edge::Link { tail, head } => match (tail, head) {
                (Tail::Vertex(_), Head::Vertex(_)) => EdgeKind::Internal,
                (Tail::Input(_), Head::Vertex(_)) => EdgeKind::Input,
                (Tail::Vertex(_), Head::Output(_)) => EdgeKind::Output,
                (Tail::Input(_), Head::Output(_)) => EdgeKind::Io,
            },
        }
    }

    pub fn tail(&self) -> Option<Tail> {
        match self {
            Edge::Link { tail, .. } => Some(*tail),
            Edge::Loop => None,
        }
    }

    pub fn head(&self) -> Option<Head> {
        match self {
            Edge::Link { head, .. } => Some(*head),
            Edge::Loop => None,
        }
    }

    pub fn source(&self) -> Option<VertexId> {
        match self.tail() {
            Some(Tail::Vertex(v)) => Some(v),
            _ => None,
        }
    }

    pub fn target(&self) -> Option<VertexId> {
        match self.head() {
            Some(Head::Vertex(v)) => Some(v),
            _ => None,
        }
    }

    pub fn in_index(&self) -> Option<usize> {
        match self.tail() {
            Some(Tail::Input(i)) => Some(i),
            _ => None,
        }
    }

    pub fn out_index(&self) -> Option<usize> {
        match self.head() {
            Some(Head::Output(j)) => Some(j),
            _ => None,
        }
    }

    fn map_indices(self, fin: impl Fn(usize) -> usize, fout: impl Fn(usize) -> usize) -> Self {
        match self {
            Edge::Loop => Edge::Loop,
            Edge::Link { tail, head } => Edge::Link {
                tail: match tail {
                    Tail::Input(i) => Tail::Input(fin(i)),
                    t => t,
                },
                head: match head {
                    Head::Output(j) => Head::Output(fout(j)),
                    h => h,
                },
            },
        }
    }

    fn shift(self, dv: usize, dk: usize, dl: usize) -> Self {
        match self {
            Edge::Loop => Edge::Loop,
            Edge::Link { tail, head } => Edge::Link {
                tail: match tail {
                    Tail::Input(i) => Tail::Input(i + dk),
                    Tail::Vertex(v) => Tail::Vertex(v + dv),
                },
                head: match head {
                    Head::Output(j) => Head::Output(j + dl),
                    Head::Vertex(v) => Head::Vertex(v + dv),
                },
            },
        }
    }
}

/// A vertex with its decoration and its ordered incoming and outgoing edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex<D> {
    pub decoration: D,
    pub ins: Vec<EdgeId>,
    pub outs: Vec<EdgeId>,
}

impl<D> Vertex<D> {
    pub fn arity(&self) -> (usize, usize) {
        (self.ins.len(), self.outs.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph<D> {
    vertices: Vec<Vertex<D>>,
    edges: Vec<Edge>,
    k: usize,
    l: usize,
}

impl<D> Graph<D> {
    /// Checks every structural invariant and computes the global arities.
    pub fn from_parts(vertices: Vec<Vertex<D>>, edges: Vec<Edge>) -> Result<Self> {
        let bad = |msg: String| Err(TrapError::InvalidGraph(msg));
        let ne = edges.len();
        let nv = vertices.len();
        let mut in_slot = vec![None; ne];
        let mut out_slot = vec![None; ne];
        for (v, vert) in vertices.iter().enumerate() {
            for &e in &vert.ins {
                if e >= ne {
                    return bad(format!("vertex {v} refers to missing edge {e}"));
                }
                if in_slot[e].replace(v).is_some() {
                    return bad(format!("edge {e} enters more than one slot"));
                }
            }
            for &e in &vert.outs {
                if e >= ne {
                    return bad(format!("vertex {v} refers to missing edge {e}"));
                }
                if out_slot[e].replace(v).is_some() {
                    return bad(format!("edge {e} leaves more than one slot"));
                }
            }
        }
        let mut ins = BTreeSet::new();
        let mut outs = BTreeSet::new();
        for (e, edge) in edges.iter().enumerate() {
            let (tail, head) = match edge {
                Edge::Loop => (None, None),
                Edge::Link { tail, head } => (Some(*tail), Some(*head)),
            };
            match tail {
                Some(Tail::Vertex(v)) => {
                    if v >= nv || out_slot[e] != Some(v) {
                        return bad(format!("edge {e} is not in the out-slots of its source {v}"));
                    }
                }
                Some(Tail::Input(i)) => {
                    if out_slot[e].is_some() {
                        return bad(format!("input edge {e} also sits in an out-slot"));
                    }
                    if i == 0 || !ins.insert(i) {
                        return bad(format!("input index {i} is zero or repeated"));
                    }
                }
                None => {
                    if out_slot[e].is_some() {
                        return bad(format!("loop {e} sits in an out-slot"));
                    }
                }
            }
            match head {
                Some(Head::Vertex(v)) => {
                    if v >= nv || in_slot[e] != Some(v) {
                        return bad(format!("edge {e} is not in the in-slots of its target {v}"));
                    }
                }
                Some(Head::Output(j)) => {
                    if in_slot[e].is_some() {
                        return bad(format!("output edge {e} also sits in an in-slot"));
                    }
                    if j == 0 || !outs.insert(j) {
                        return bad(format!("output index {j} is zero or repeated"));
                    }
                }
                None => {
                    if in_slot[e].is_some() {
                        return bad(format!("loop {e} sits in an in-slot"));
                    }
                }
            }
        }
        let k = ins.len();
        let l = outs.len();
        if ins.last().is_some_and(|&m| m != k) {
            return bad(format!("input indices are not 1..{k}"));
        }
        if outs.last().is_some_and(|&m| m != l) {
            return bad(format!("output indices are not 1..{l}"));
        }
        Ok(Self { vertices, edges, k, l })
    }

    pub fn into_parts(self) -> (Vec<Vertex<D>>, Vec<Edge>) {
        (self.vertices, self.edges)
    }

    /// `I_0`: no vertices, no edges.
    pub fn empty() -> Self {
        Self {
            vertices: Vec::new(),
            edges: Vec::new(),
            k: 0,
            l: 0,
        }
    }

    /// `I`: a single input-output edge.
    pub fn unit() -> Self {
        Self {
            vertices: Vec::new(),
            edges: vec![Edge::Link {
                tail: Tail::Input(1),
                head: Head::Output(1),
            }],
            k: 1,
            l: 1,
        }
    }

    /// `𝒪`: a single loop.
    pub fn loop_graph() -> Self {
        Self {
            vertices: Vec::new(),
            edges: vec![Edge::Loop],
            k: 0,
            l: 0,
        }
    }

    /// One vertex with inputs `1..=k` and outputs `1..=l` in slot order.
    pub fn corolla(decoration: D, k: usize, l: usize) -> Self {
        let mut edges = Vec::with_capacity(k + l);
        edges.extend((1..=k).map(|i| Edge::Link {
            tail: Tail::Input(i),
            head: Head::Vertex(0),
        }));
        edges.extend((1..=l).map(|j| Edge::Link {
            tail: Tail::Vertex(0),
            head: Head::Output(j),
        }));
        Self {
            vertices: vec![Vertex {
                decoration,
                ins: (0..k).collect(),
                outs: (k..k + l).collect(),
            }],
            edges,
            k,
            l,
        }
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.k, self.l)
    }

    pub fn vertices(&self) -> &[Vertex<D>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, v: VertexId) -> Result<&Vertex<D>> {
        self.vertices.get(v).ok_or(TrapError::UnknownVertex(v))
    }

    pub fn count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind() == kind).count()
    }

    pub fn loop_count(&self) -> usize {
        self.count(EdgeKind::Loop)
    }

    /// Edge carrying global input `i`.
    pub fn input_edge(&self, i: usize) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.in_index() == Some(i))
    }

    /// Edge carrying global output `j`.
    pub fn output_edge(&self, j: usize) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.out_index() == Some(j))
    }

    /// Slot position (0-based) of edge `e` among the out-slots of its source.
    pub fn out_slot_of(&self, e: EdgeId) -> Option<(VertexId, usize)> {
        let v = self.edges[e].source()?;
        let s = self.vertices[v].outs.iter().position(|&x| x == e)?;
        Some((v, s))
    }

    /// Slot position (0-based) of edge `e` among the in-slots of its target.
    pub fn in_slot_of(&self, e: EdgeId) -> Option<(VertexId, usize)> {
        let v = self.edges[e].target()?;
        let s = self.vertices[v].ins.iter().position(|&x| x == e)?;
        Some((v, s))
    }

    pub fn map_decorations<E>(self, mut f: impl FnMut(D) -> E) -> Graph<E> {
        Graph {
            vertices: self
                .vertices
                .into_iter()
                .map(|v| Vertex {
                    decoration: f(v.decoration),
                    ins: v.ins,
                    outs: v.outs,
                })
                .collect(),
            edges: self.edges,
            k: self.k,
            l: self.l,
        }
    }

    pub fn try_map_decorations<E, Er>(
        self,
        mut f: impl FnMut(VertexId, D) -> std::result::Result<E, Er>,
    ) -> std::result::Result<Graph<E>, Er> {
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.into_iter().enumerate() {
            vertices.push(Vertex {
                decoration: f(i, v.decoration)?,
                ins: v.ins,
                outs: v.outs,
            });
        }
        Ok(Graph {
            vertices,
            edges: self.edges,
            k: self.k,
            l: self.l,
        })
    }

    /// Drops removed edges and renumbers the survivors in order.
    fn compact(vertices: Vec<Vertex<D>>, edges: Vec<Option<Edge>>, k: usize, l: usize) -> Self {
        let mut remap = vec![usize::MAX; edges.len()];
        let mut kept = Vec::with_capacity(edges.len());
        for (old, e) in edges.into_iter().enumerate() {
            if let Some(e) = e {
                remap[old] = kept.len();
                kept.push(e);
            }
        }
        let vertices = vertices
            .into_iter()
            .map(|v| Vertex {
                decoration: v.decoration,
                ins: v.ins.iter().map(|&e| remap[e]).collect(),
                outs: v.outs.iter().map(|&e| remap[e]).collect(),
            })
            .collect();
        Self {
            vertices,
            edges: kept,
            k,
            l,
        }
    }
}

impl<D: Clone> Graph<D> {
    /// `σ · G · τ`: input index `a` becomes `τ⁻¹(a)`, output index `b`
    /// becomes `σ(b)`.
    pub fn act(&self, sigma: &Permutation, tau: &Permutation) -> Result<Self> {
        if sigma.degree() != self.l {
            return Err(TrapError::DegreeMismatch {
                expected: self.l,
                got: sigma.degree(),
            });
        }
        if tau.degree() != self.k {
            return Err(TrapError::DegreeMismatch {
                expected: self.k,
                got: tau.degree(),
            });
        }
        let tau_inv = tau.inverse();
        let mut g = self.clone();
        for e in &mut g.edges {
            *e = e.map_indices(|i| tau_inv.image(i), |j| sigma.image(j));
        }
        Ok(g)
    }

    /// Reorders the slots of vertex `v`: in-slot `m` receives the edge of old
    /// in-slot `τ(m)`, out-slot `m` the edge of old out-slot `σ⁻¹(m)`.
    pub fn vertex_act(&self, sigma: &Permutation, v: VertexId, tau: &Permutation) -> Result<Self> {
        let vert = self.vertex(v)?;
        let (i, o) = vert.arity();
        if tau.degree() != i {
            return Err(TrapError::DegreeMismatch {
                expected: i,
                got: tau.degree(),
            });
        }
        if sigma.degree() != o {
            return Err(TrapError::DegreeMismatch {
                expected: o,
                got: sigma.degree(),
            });
        }
        let ins = (1..=i).map(|m| vert.ins[tau.image(m) - 1]).collect();
        let outs = sigma.apply(&vert.outs)?;
        let mut g = self.clone();
        g.vertices[v].ins = ins;
        g.vertices[v].outs = outs;
        Ok(g)
    }

    /// Disjoint union; the inputs and outputs of `h` come after those of `self`.
    pub fn hconcat(&self, h: &Self) -> Self {
        let dv = self.vertices.len();
        let de = self.edges.len();
        let mut vertices = self.vertices.clone();
        vertices.extend(h.vertices.iter().map(|v| Vertex {
            decoration: v.decoration.clone(),
            ins: v.ins.iter().map(|e| e + de).collect(),
            outs: v.outs.iter().map(|e| e + de).collect(),
        }));
        let mut edges = self.edges.clone();
        edges.extend(h.edges.iter().map(|e| e.shift(dv, self.k, self.l)));
        Self {
            vertices,
            edges,
            k: self.k + h.k,
            l: self.l + h.l,
        }
    }

    /// `t_{i,j}`: glue global input `i` to global output `j`.
    pub fn partial_trace(&self, i: usize, j: usize) -> Result<Self> {
        check_index(i, self.k)?;
        check_index(j, self.l)?;
        let e = self.input_edge(i).expect("validated graph");
        let f = self.output_edge(j).expect("validated graph");
        let mut vertices = self.vertices.clone();
        let mut edges: Vec<Option<Edge>> = self.edges.iter().copied().map(Some).collect();
        if e == f {
            edges[e] = Some(Edge::Loop);
        } else {
            let head = self.edges[e].head().expect("input edge has a head");
            let tail = self.edges[f].tail().expect("output edge has a tail");
            edges[f] = Some(Edge::Link { tail, head });
            if let Head::Vertex(w) = head {
                for slot in &mut vertices[w].ins {
                    if *slot == e {
                        *slot = f;
                    }
                }
            }
            edges[e] = None;
        }
        for edge in edges.iter_mut().flatten() {
            *edge = edge.map_indices(
                |a| if a > i { a - 1 } else { a },
                |b| if b > j { b - 1 } else { b },
            );
        }
        Ok(Self::compact(vertices, edges, self.k - 1, self.l - 1))
    }

    /// `self ∘ g`: output `j` of `g` glued to input `j` of `self`.
    pub fn vconcat(&self, g: &Self) -> Result<Self> {
        if g.l != self.k {
            return Err(TrapError::ArityMismatch(format!(
                "cannot compose: {} outputs against {} inputs",
                g.l, self.k
            )));
        }
        let dv = g.vertices.len();
        let de = g.edges.len();
        let mut vertices = g.vertices.clone();
        vertices.extend(self.vertices.iter().map(|v| Vertex {
            decoration: v.decoration.clone(),
            ins: v.ins.iter().map(|e| e + de).collect(),
            outs: v.outs.iter().map(|e| e + de).collect(),
        }));
        let mut edges: Vec<Option<Edge>> = g.edges.iter().copied().map(Some).collect();
        edges.extend(self.edges.iter().map(|e| Some(e.shift(dv, 0, 0))));
        for j in 1..=g.l {
            let e = g.output_edge(j).expect("validated graph");
            let f = de + self.input_edge(j).expect("validated graph");
            let tail = g.edges[e].tail().expect("output edge has a tail");
            let head = edges[f].and_then(|x| x.head()).expect("input edge has a head");
            edges[e] = Some(Edge::Link { tail, head });
            if let Head::Vertex(w) = head {
                for slot in &mut vertices[w].ins {
                    if *slot == f {
                        *slot = e;
                    }
                }
            }
            edges[f] = None;
        }
        Ok(Self::compact(vertices, edges, g.k, self.l))
    }

    /// `Tr(G) = t_{1,1} ∘ … ∘ t_{k,k}(G)`.
    pub fn gtrace(&self) -> Result<Self> {
        if self.k != self.l {
            return Err(TrapError::ArityMismatch(format!(
                "trace needs as many inputs as outputs, got ({}, {})",
                self.k, self.l
            )));
        }
        let mut g = self.clone();
        for i in (1..=self.k).rev() {
            g = g.partial_trace(i, i)?;
        }
        Ok(g)
    }

    /// `G^{*n}`.
    pub fn power(&self, n: usize) -> Self {
        (0..n).fold(Self::empty(), |acc, _| acc.hconcat(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type G = Graph<&'static str>;

    fn p(w: &[usize]) -> Permutation {
        Permutation::from_images(w).unwrap()
    }

    #[test]
    fn constructors() {
        let c = G::corolla("x", 3, 2);
        assert_eq!(c.arity(), (3, 2));
        assert_eq!(c.vertices().len(), 1);
        assert_eq!(c.count(EdgeKind::Input), 3);
        assert_eq!(c.count(EdgeKind::Output), 2);
        let ins: Vec<_> = c.vertices()[0].ins.iter().map(|&e| c.edges()[e].in_index().unwrap()).collect();
        assert_eq!(ins, vec![1, 2, 3]);
        let outs: Vec<_> = c.vertices()[0].outs.iter().map(|&e| c.edges()[e].out_index().unwrap()).collect();
        assert_eq!(outs, vec![1, 2]);
        assert!(G::from_parts(c.vertices().to_vec(), c.edges().to_vec()).is_ok());

        let iso = G::corolla("x", 0, 0);
        assert_eq!(iso.edges().len(), 0);
        assert_eq!(iso.vertices().len(), 1);

        let u = G::unit();
        assert_eq!(u.arity(), (1, 1));
        assert!(u.vertices().is_empty());
        assert_eq!(G::loop_graph().arity(), (0, 0));
        assert_eq!(G::unit().hconcat(&G::unit()).arity(), (2, 2));
    }

    #[test]
    fn validation_rejects_broken_parts() {
        let v = Vertex { decoration: "x", ins: vec![0], outs: vec![] };
        let e = vec![Edge::Link { tail: Tail::Input(2), head: Head::Vertex(0) }];
        assert!(G::from_parts(vec![v.clone()], e).is_err());
        let e = vec![Edge::Link { tail: Tail::Input(1), head: Head::Output(1) }];
        assert!(G::from_parts(vec![v.clone()], e).is_err());
        let e = vec![Edge::Loop];
        assert!(G::from_parts(vec![v], e).is_err());
        let dup = vec![
            Edge::Link { tail: Tail::Input(1), head: Head::Output(1) },
            Edge::Link { tail: Tail::Input(1), head: Head::Output(2) },
        ];
        assert!(G::from_parts(vec![], dup).is_err());
    }

    #[test]
    fn trace_of_unit_is_loop() {
        assert_eq!(G::unit().partial_trace(1, 1).unwrap(), G::loop_graph());
        assert_eq!(G::unit().gtrace().unwrap(), G::loop_graph());
        assert_eq!(G::empty().gtrace().unwrap(), G::empty());
        assert!(G::empty().partial_trace(1, 1).is_err());
    }

    #[test]
    fn trace_unit_against_corolla() {
        let x = G::corolla("x", 1, 1);
        let t = G::unit().hconcat(&x).partial_trace(1, 2).unwrap();
        assert!(iso_eq(&t, &x));
    }

    #[test]
    fn trace_builds_a_chain() {
        let g = G::corolla("x", 1, 1).hconcat(&G::corolla("y", 1, 1));
        let t = g.partial_trace(2, 1).unwrap();
        assert_eq!(t.arity(), (1, 1));
        assert_eq!(t.count(EdgeKind::Internal), 1);
        let internal = t.edges().iter().find(|e| e.kind() == EdgeKind::Internal).unwrap();
        assert_eq!(t.vertices()[internal.source().unwrap()].decoration, "x");
        assert_eq!(t.vertices()[internal.target().unwrap()].decoration, "y");
        let input = t.input_edge(1).unwrap();
        assert_eq!(t.vertices()[t.edges()[input].target().unwrap()].decoration, "x");
        let output = t.output_edge(1).unwrap();
        assert_eq!(t.vertices()[t.edges()[output].source().unwrap()].decoration, "y");
    }

    #[test]
    fn trace_cases_with_io_edges() {
        // io edge then output edge: the output edge inherits the io output index
        let g = G::unit().hconcat(&G::corolla("x", 0, 1));
        let t = g.partial_trace(1, 2).unwrap();
        assert_eq!(t, G::corolla("x", 0, 1));
        // input edge then io edge: the input edge inherits the io input index
        let g = G::corolla("x", 1, 0).hconcat(&G::unit());
        let t = g.partial_trace(1, 1).unwrap();
        assert_eq!(t, G::corolla("x", 1, 0));
        // two io edges merge
        let g = G::unit().hconcat(&G::unit());
        let t = g.partial_trace(1, 2).unwrap();
        assert_eq!(t, G::unit());
    }

    #[test]
    fn act_relabels_indices() {
        let g = G::unit().hconcat(&G::unit());
        let h = g.act(&p(&[2, 1]), &Permutation::identity(2)).unwrap();
        let e = h.input_edge(1).unwrap();
        assert_eq!(h.edges()[e].out_index(), Some(2));
        assert_eq!(g.act(&Permutation::identity(2), &Permutation::identity(2)).unwrap(), g);
        assert!(g.act(&Permutation::identity(3), &Permutation::identity(2)).is_err());
    }

    #[test]
    fn hconcat_example_indices() {
        // a (2,3) and a (1,2) graph give inputs 1..3 and outputs 1..5
        let g = G::corolla("x", 2, 3);
        let h = G::corolla("y", 1, 2);
        let gh = g.hconcat(&h);
        assert_eq!(gh.arity(), (3, 5));
        let y = 1;
        let ins: Vec<_> = gh.vertices()[y].ins.iter().map(|&e| gh.edges()[e].in_index().unwrap()).collect();
        let outs: Vec<_> = gh.vertices()[y].outs.iter().map(|&e| gh.edges()[e].out_index().unwrap()).collect();
        assert_eq!(ins, vec![3]);
        assert_eq!(outs, vec![4, 5]);
        assert!(iso_eq(&G::empty().hconcat(&g), &g));
    }

    #[test]
    fn vertex_act_swaps_parallel_edges() {
        // x has two outputs both feeding y
        let g = G::corolla("x", 0, 2).hconcat(&G::corolla("y", 2, 0));
        let g = g.partial_trace(1, 1).unwrap().partial_trace(1, 1).unwrap();
        let s = Permutation::transposition(2, 1, 2);
        let h = g.vertex_act(&s, 0, &Permutation::identity(0)).unwrap();
        assert!(!iso_eq(&g, &h));
        let back = h.vertex_act(&s, 0, &Permutation::identity(0)).unwrap();
        assert_eq!(back, g);
        let same = g.vertex_act(&Permutation::identity(0), 1, &Permutation::identity(2)).unwrap();
        assert_eq!(same, g);
        assert!(g.vertex_act(&s, 7, &Permutation::identity(0)).is_err());
    }

    #[test]
    fn vconcat_unit_laws() {
        let g = G::corolla("x", 2, 3);
        assert!(iso_eq(&G::unit().power(3).vconcat(&g).unwrap(), &g));
        assert!(iso_eq(&g.vconcat(&G::unit().power(2)).unwrap(), &g));
        assert!(g.vconcat(&g).is_err());
    }
}
