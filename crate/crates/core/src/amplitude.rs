//! Evaluation of decorated graphs in a backend: the amplitude map `Φ`.
//!
//! [`evaluate_naive`] cuts internal edges one at a time and applies `t_{1,1}`
//! per cut; it is slow and serves as the reference. [`evaluate`] follows a
//! [`ContractionPlan`] that merges vertices pairwise, contracting every edge
//! between the two at once.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrapError};
use crate::graph::{Edge, EdgeId, EdgeKind, Graph, Head, Tail, VertexId};
use crate::perm::Permutation;
use crate::trapcore::{hpower, Trap};

fn check_decorations<B: Trap>(g: &Graph<B::Elem>, backend: &B) -> Result<()> {
    for (v, vert) in g.vertices().iter().enumerate() {
        let got = backend.arity(&vert.decoration);
        if got != vert.arity() {
            return Err(TrapError::ArityMismatch(format!(
                "vertex {v} has arity {:?} but its decoration has arity {got:?}",
                vert.arity()
            )));
        }
    }
    Ok(())
}

/// `t_{1,1}(I)^{*p} * σ·(I^{*q} * x₁ * … * x_r)·τ` for a graph whose only
/// edges are `p` loops, `q` input-output edges and edges between a vertex
/// and a global input or output. `parts` lists each vertex value with its
/// in- and out-edges in slot order.
fn assemble<B: Trap>(backend: &B, edges: &[Edge], parts: Vec<(B::Elem, &[EdgeId], &[EdgeId])>) -> Result<B::Elem> {
    let loops = edges.iter().filter(|e| e.kind() == EdgeKind::Loop).count();
    let mut io: Vec<&Edge> = edges.iter().filter(|e| e.kind() == EdgeKind::Io).collect();
    io.sort_by_key(|e| e.in_index());
    let unit = if loops > 0 || !io.is_empty() {
        Some(backend.unit1().ok_or(TrapError::NotUnitary)?)
    } else {
        None
    };

    let global = |idx: Option<usize>, e: EdgeId| {
        idx.ok_or_else(|| TrapError::InvalidGraph(format!("edge {e} is internal at assembly time")))
    };
    let mut g: Vec<usize> = io.iter().map(|e| e.in_index().expect("io edge")).collect();
    let mut h: Vec<usize> = io.iter().map(|e| e.out_index().expect("io edge")).collect();
    let mut x = match &unit {
        Some(u) => hpower(backend, u, io.len())?,
        None => backend.unit0(),
    };
    for (elem, ins, outs) in parts {
        for &e in ins {
            g.push(global(edges[e].in_index(), e)?);
        }
        for &e in outs {
            h.push(global(edges[e].out_index(), e)?);
        }
        x = backend.hconcat(&x, &elem)?;
    }
    let tau = Permutation::from_images(&g)?.inverse();
    let sigma = Permutation::from_images(&h)?;
    let body = backend.act(&sigma, &x, &tau)?;
    match unit {
        Some(u) if loops > 0 => {
            let t = backend.partial_trace(&u, 1, 1)?;
            backend.hconcat(&hpower(backend, &t, loops)?, &body)
        }
        _ => Ok(body),
    }
}

/// Reference evaluation, cutting internal edges in index order.
pub fn evaluate_naive<B: Trap>(g: &Graph<B::Elem>, backend: &B) -> Result<B::Elem> {
    let order: Vec<EdgeId> = (0..g.edges().len())
        .filter(|&e| g.edges()[e].kind() == EdgeKind::Internal)
        .collect();
    evaluate_naive_with_order(g, backend, &order)
}

/// Reference evaluation with an explicit cut order: `Φ(G) = t_{1,1}(Φ(G_e))`
/// where `G_e` is `G` with `e` cut into a new first input and first output.
/// `order` must list every internal edge exactly once.
pub fn evaluate_naive_with_order<B: Trap>(g: &Graph<B::Elem>, backend: &B, order: &[EdgeId]) -> Result<B::Elem> {
    check_decorations(g, backend)?;
    let mut edges = g.edges().to_vec();
    let mut ins: Vec<Vec<EdgeId>> = g.vertices().iter().map(|v| v.ins.clone()).collect();
    let outs: Vec<Vec<EdgeId>> = g.vertices().iter().map(|v| v.outs.clone()).collect();
    let internal = edges.iter().filter(|e| e.kind() == EdgeKind::Internal).count();
    let mut seen = vec![false; edges.len()];
    if order.len() != internal {
        return Err(TrapError::InvalidData(format!("cut order has {} edges, graph has {internal} internal edges", order.len())));
    }
    for &e in order {
        let Some(Edge::Link { tail: Tail::Vertex(u), head: Head::Vertex(w) }) = edges.get(e).copied() else {
            return Err(TrapError::InvalidData(format!("edge {e} is not internal")));
        };
        if std::mem::replace(&mut seen[e], true) {
            return Err(TrapError::InvalidData(format!("edge {e} cut twice")));
        }
        for edge in edges.iter_mut() {
            if let Edge::Link { tail, head } = edge {
                if let Tail::Input(i) = tail {
                    *i += 1;
                }
                if let Head::Output(j) = head {
                    *j += 1;
                }
            }
        }
        edges[e] = Edge::Link {
            tail: Tail::Vertex(u),
            head: Head::Output(1),
        };
        let fresh = edges.len();
        edges.push(Edge::Link {
            tail: Tail::Input(1),
            head: Head::Vertex(w),
        });
        let slot = ins[w].iter_mut().find(|x| **x == e).expect("edge in its target's slots");
        *slot = fresh;
    }
    let parts = g
        .vertices()
        .iter()
        .zip(ins.iter().zip(&outs))
        .map(|(v, (i, o))| (v.decoration.clone(), i.as_slice(), o.as_slice()))
        .collect();
    let mut cur = assemble(backend, &edges, parts)?;
    for _ in 0..order.len() {
        cur = backend.partial_trace(&cur, 1, 1)?;
    }
    Ok(cur)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Step {
    /// Contract every edge between nodes `a < b`; the result replaces `a`.
    Merge { a: VertexId, b: VertexId },
    /// Contract an edge from a node to itself.
    SelfTrace { edge: EdgeId },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannedStep {
    #[serde(flatten)]
    pub step: Step,
    /// Entries of the element produced by this step.
    pub cost: f64,
}

/// An order in which to contract the internal edges of a graph. Nodes start
/// as the vertices and keep the smaller id when merged.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ContractionPlan {
    pub steps: Vec<PlannedStep>,
    pub peak_cost: f64,
}

/// Ports of the nodes during a contraction, and which nodes each internal
/// edge currently joins.
struct Network<E> {
    nodes: Vec<Option<(E, Vec<EdgeId>, Vec<EdgeId>)>>,
    src: Vec<Option<VertexId>>,
    dst: Vec<Option<VertexId>>,
    open: usize,
}

impl<E> Network<E> {
    fn new<D>(g: &Graph<D>, mut value: impl FnMut(VertexId) -> E) -> Self {
        let mut src = vec![None; g.edges().len()];
        let mut dst = vec![None; g.edges().len()];
        let mut open = 0;
        for (e, edge) in g.edges().iter().enumerate() {
            if edge.kind() == EdgeKind::Internal {
                src[e] = edge.source();
                dst[e] = edge.target();
                open += 1;
            }
        }
        let nodes = g
            .vertices()
            .iter()
            .enumerate()
            .map(|(v, vert)| Some((value(v), vert.ins.clone(), vert.outs.clone())))
            .collect();
        Self { nodes, src, dst, open }
    }

    fn legs(&self, n: VertexId) -> usize {
        self.nodes[n].as_ref().map_or(0, |(_, i, o)| i.len() + o.len())
    }

    fn shared(&self, a: VertexId, b: VertexId) -> usize {
        self.src
            .iter()
            .zip(&self.dst)
            .filter(|(s, d)| matches!((s, d), (Some(x), Some(y)) if (*x == a && *y == b) || (*x == b && *y == a)))
            .count()
    }

    fn self_edges(&self) -> Vec<EdgeId> {
        (0..self.src.len())
            .filter(|&e| self.src[e].is_some() && self.src[e] == self.dst[e])
            .collect()
    }

    /// `(in, out)` pairs (1-based, numbering of the product `a * b`) for the
    /// edges between `a` and `b`.
    fn merge_pairs(&self, a: VertexId, b: VertexId) -> Result<(Vec<(usize, usize)>, Vec<EdgeId>)> {
        let (Some((_, ia, oa)), Some((_, ib, ob))) = (&self.nodes[a], &self.nodes[b]) else {
            return Err(TrapError::InvalidData(format!("merge of dead node {a} or {b}")));
        };
        let pos = |v: &[EdgeId], e| v.iter().position(|&x| x == e).expect("port of a live node");
        let mut pairs = Vec::new();
        let mut edges = Vec::new();
        for e in 0..self.src.len() {
            match (self.src[e], self.dst[e]) {
                (Some(s), Some(d)) if s == a && d == b => pairs.push((ia.len() + pos(ib, e) + 1, pos(oa, e) + 1)),
                (Some(s), Some(d)) if s == b && d == a => pairs.push((pos(ia, e) + 1, oa.len() + pos(ob, e) + 1)),
                _ => continue,
            }
            edges.push(e);
        }
        if pairs.is_empty() {
            return Err(TrapError::InvalidData(format!("nodes {a} and {b} share no edge")));
        }
        Ok((pairs, edges))
    }

    fn apply(&mut self, step: Step, mut combine: impl FnMut(&E, Option<&E>, &[(usize, usize)]) -> Result<E>) -> Result<()> {
        match step {
            Step::SelfTrace { edge } => {
                let n = match (self.src.get(edge), self.dst.get(edge)) {
                    (Some(&Some(s)), Some(&Some(d))) if s == d => s,
                    _ => return Err(TrapError::InvalidData(format!("edge {edge} is not a self edge"))),
                };
                let (elem, ins, outs) = self.nodes[n].as_mut().expect("endpoint is live");
                let i = ins.iter().position(|&x| x == edge).expect("port");
                let j = outs.iter().position(|&x| x == edge).expect("port");
                *elem = combine(elem, None, &[(i + 1, j + 1)])?;
                ins.remove(i);
                outs.remove(j);
                self.src[edge] = None;
                self.dst[edge] = None;
                self.open -= 1;
            }
            Step::Merge { a, b } => {
                if a >= b || b >= self.nodes.len() {
                    return Err(TrapError::InvalidData(format!("bad merge ({a}, {b})")));
                }
                let (pairs, joined) = self.merge_pairs(a, b)?;
                let (eb, ib, ob) = self.nodes[b].take().expect("checked live");
                let (ea, ia, oa) = self.nodes[a].take().expect("checked live");
                let elem = combine(&ea, Some(&eb), &pairs)?;
                for &e in &joined {
                    self.src[e] = None;
                    self.dst[e] = None;
                }
                self.open -= joined.len();
                let keep = |e: &EdgeId| !joined.contains(e);
                let ins: Vec<EdgeId> = ia.into_iter().chain(ib).filter(keep).collect();
                let outs: Vec<EdgeId> = oa.into_iter().chain(ob).filter(keep).collect();
                for end in self.src.iter_mut().chain(self.dst.iter_mut()) {
                    if *end == Some(b) {
                        *end = Some(a);
                    }
                }
                self.nodes[a] = Some((elem, ins, outs));
            }
        }
        Ok(())
    }
}

/// Greedy plan: self edges first, then repeatedly the merge of two adjacent
/// nodes whose result has the fewest entries, `extent` per dangling leg.
pub fn plan<D>(g: &Graph<D>, extent: usize) -> Result<ContractionPlan> {
    let mut net: Network<()> = Network::new(g, |_| ());
    let size = |legs: usize| (extent as f64).powi(legs as i32);
    let mut plan = ContractionPlan::default();
    let push = |plan: &mut ContractionPlan, step, cost: f64| {
        plan.peak_cost = plan.peak_cost.max(cost);
        plan.steps.push(PlannedStep { step, cost });
    };
    for edge in net.self_edges() {
        let n = net.src[edge].expect("self edge");
        net.apply(Step::SelfTrace { edge }, |_, _, _| Ok(()))?;
        push(&mut plan, Step::SelfTrace { edge }, size(net.legs(n)));
    }
    while net.open > 0 {
        let mut best: Option<(f64, VertexId, VertexId)> = None;
        for e in 0..net.src.len() {
            let (Some(s), Some(d)) = (net.src[e], net.dst[e]) else { continue };
            let (a, b) = (s.min(d), s.max(d));
            let legs = net.legs(a) + net.legs(b) - 2 * net.shared(a, b);
            let cand = (size(legs), a, b);
            if best.is_none_or(|x| (cand.0, cand.1, cand.2) < x) {
                best = Some(cand);
            }
        }
        let (cost, a, b) = best.expect("an open edge joins two nodes");
        net.apply(Step::Merge { a, b }, |_, _, _| Ok(()))?;
        push(&mut plan, Step::Merge { a, b }, cost);
    }
    Ok(plan)
}

/// `Φ(G)` by pairwise contraction, following `plan` or a fresh greedy plan.
pub fn evaluate<B: Trap>(g: &Graph<B::Elem>, backend: &B, plan: Option<&ContractionPlan>) -> Result<B::Elem> {
    check_decorations(g, backend)?;
    let owned;
    let plan = match plan {
        Some(p) => p,
        None => {
            owned = self::plan(g, backend.edge_extent())?;
            &owned
        }
    };
    let mut net = Network::new(g, |v| g.vertices()[v].decoration.clone());
    for s in &plan.steps {
        net.apply(s.step, |a, b, pairs| match b {
            Some(b) => backend.contract(a, b, pairs),
            None => backend.trace_many(a, pairs),
        })?;
    }
    if net.open > 0 {
        return Err(TrapError::InvalidData(format!("plan leaves {} internal edges", net.open)));
    }
    let parts = net
        .nodes
        .iter()
        .flatten()
        .map(|(e, i, o)| (e.clone(), i.as_slice(), o.as_slice()))
        .collect();
    assemble(backend, g.edges(), parts)
}

/// `Φ(G)` for decorations invariant under both symmetric actions, where the
/// slot order at each vertex carries no information.
pub fn amplitude_of_unordered<B: Trap>(g: &Graph<B::Elem>, backend: &B) -> Result<B::Elem> {
    check_decorations(g, backend)?;
    for (v, vert) in g.vertices().iter().enumerate() {
        let p = &vert.decoration;
        let (k, l) = vert.arity();
        let adjacent = |n: usize| (1..n).map(move |i| Permutation::transposition(n, i, i + 1));
        let moves = adjacent(l)
            .map(|s| (s, Permutation::identity(k)))
            .chain(adjacent(k).map(|t| (Permutation::identity(l), t)));
        for (s, t) in moves {
            if !backend.eq(&backend.act(&s, p, &t)?, p) {
                return Err(TrapError::NotInvariant(format!("vertex {v}: σ = {s}, τ = {t}")));
            }
        }
    }
    evaluate(g, backend, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_graph, RandomGraphOptions};
    use crate::homv::{DenseTensor, HomV};
    use crate::kernel::{KernelTrap, NamedKernel, TorusGrid};
    use crate::trapcore::vconcat;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn corolla(t: &DenseTensor) -> Graph<DenseTensor> {
        Graph::corolla(t.clone(), t.k(), t.l())
    }

    #[test]
    fn corolla_evaluates_to_its_decoration() {
        let b = HomV::<f64>::new(3);
        let p = b.random(&mut ChaCha8Rng::seed_from_u64(1), 2, 1);
        assert_eq!(evaluate_naive(&corolla(&p), &b).unwrap(), p);
        assert_eq!(evaluate(&corolla(&p), &b, None).unwrap(), p);
    }

    #[test]
    fn loop_evaluates_to_dimension() {
        let b = HomV::<f64>::new(5);
        let g = Graph::<DenseTensor>::loop_graph();
        assert_eq!(evaluate_naive(&g, &b).unwrap().as_scalar(), Some(5.0));
        assert_eq!(evaluate(&g, &b, None).unwrap().as_scalar(), Some(5.0));
    }

    #[test]
    fn chain_is_matrix_product() {
        let b = HomV::<f64>::new(3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (x, y) = (b.random(&mut rng, 1, 1), b.random(&mut rng, 1, 1));
        let g = corolla(&y).vconcat(&corolla(&x)).unwrap();
        let want = vconcat(&b, &y, &x).unwrap();
        let (mx, my) = (x.to_linear_map().unwrap(), y.to_linear_map().unwrap());
        let got = evaluate_naive(&g, &b).unwrap().to_linear_map().unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let m: f64 = (0..3).map(|i| my[r][i] * mx[i][c]).sum();
                assert!((got[r][c] - m).abs() < 1e-14);
            }
        }
        assert!(b.eq(&evaluate(&g, &b, None).unwrap(), &want));
    }

    #[test]
    fn planned_and_naive_agree_with_any_cut_order() {
        let b = HomV::<f64>::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let opts = RandomGraphOptions { max_vertices: 4, ..Default::default() };
        for _ in 0..100 {
            let (k, l) = (rng.gen_range(0..3), rng.gen_range(0..3));
            let g = random_graph(&mut rng, k, l, &opts, |rng, i, o| b.random(rng, i, o));
            let naive = evaluate_naive(&g, &b).unwrap();
            let mut order: Vec<EdgeId> = (0..g.edges().len()).filter(|&e| g.edges()[e].kind() == EdgeKind::Internal).collect();
            order.shuffle(&mut rng);
            assert!(b.eq(&naive, &evaluate_naive_with_order(&g, &b, &order).unwrap()));
            assert!(b.eq(&naive, &evaluate(&g, &b, None).unwrap()));
        }
    }

    #[test]
    fn bad_cut_orders_are_rejected() {
        let b = HomV::<f64>::new(2);
        let x = DenseTensor::identity(2);
        let g = corolla(&x).vconcat(&corolla(&x)).unwrap();
        let internal = (0..g.edges().len()).find(|&e| g.edges()[e].kind() == EdgeKind::Internal).unwrap();
        assert!(evaluate_naive_with_order(&g, &b, &[]).is_err());
        assert!(evaluate_naive_with_order(&g, &b, &[(internal + 1) % 3]).is_err());
    }

    #[test]
    fn non_unitary_backend_refuses_io_edges() {
        let grid = TorusGrid::new(4, 1).unwrap();
        let kb = KernelTrap::new(grid);
        let c = NamedKernel::CosCos.sample(1, 1, grid).unwrap();
        let solar = Graph::corolla(c.clone(), 1, 1);
        assert!(evaluate_naive(&solar, &kb).is_ok());
        let with_wire = solar.hconcat(&Graph::unit());
        assert_eq!(evaluate_naive(&with_wire, &kb), Err(TrapError::NotUnitary));
        assert_eq!(evaluate(&with_wire, &kb, None), Err(TrapError::NotUnitary));
    }

    #[test]
    fn decoration_arity_is_checked() {
        let b = HomV::<f64>::new(2);
        let g = Graph::corolla(DenseTensor::identity(2), 2, 1);
        assert!(matches!(evaluate_naive(&g, &b), Err(TrapError::ArityMismatch(_))));
    }

    #[test]
    fn star_plan_merges_hub_with_each_leaf() {
        // hub with three inputs fed by three leaves
        let b = HomV::<f64>::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let hub = b.random(&mut rng, 3, 1);
        let leaves: Vec<DenseTensor> = (0..3).map(|_| b.random(&mut rng, 1, 1)).collect();
        let bottom = corolla(&leaves[0]).hconcat(&corolla(&leaves[1])).hconcat(&corolla(&leaves[2]));
        let g = corolla(&hub).vconcat(&bottom).unwrap();
        let p = plan(&g, 2).unwrap();
        assert_eq!(p.steps.len(), 3);
        assert!(p.steps.iter().all(|s| matches!(s.step, Step::Merge { .. })));
        assert!(b.eq(&evaluate(&g, &b, Some(&p)).unwrap(), &evaluate_naive(&g, &b).unwrap()));
    }

    #[test]
    fn plans_round_trip_through_json_and_are_validated() {
        let b = HomV::<f64>::new(2);
        let x = DenseTensor::identity(2);
        let g = corolla(&x).vconcat(&corolla(&x)).unwrap().gtrace().unwrap();
        let p = plan(&g, 2).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains(r#""action":"merge""#), "{s}");
        assert_eq!(serde_json::from_str::<ContractionPlan>(&s).unwrap(), p);
        assert_eq!(evaluate(&g, &b, Some(&p)).unwrap().as_scalar(), Some(2.0));
        assert!(evaluate(&g, &b, Some(&ContractionPlan::default())).is_err());
    }

    #[test]
    fn self_edges_are_traced_first() {
        let b = HomV::<f64>::new(3);
        let t = b.random(&mut ChaCha8Rng::seed_from_u64(5), 2, 2);
        let g = corolla(&t).partial_trace(1, 2).unwrap();
        let p = plan(&g, 3).unwrap();
        assert!(matches!(p.steps[0].step, Step::SelfTrace { .. }));
        assert!(b.eq(&evaluate(&g, &b, Some(&p)).unwrap(), &t.partial_trace(1, 2).unwrap()));
    }

    #[test]
    fn unordered_amplitudes() {
        let b = HomV::<f64>::new(2);
        let ones = DenseTensor::new(2, 1, 2, vec![1.0; 8]).unwrap();
        let source = b.random(&mut ChaCha8Rng::seed_from_u64(6), 0, 2);
        let g = Graph::corolla(ones.clone(), 2, 1).vconcat(&corolla(&source)).unwrap();
        assert!(matches!(amplitude_of_unordered(&g, &b), Err(TrapError::NotInvariant(_))));

        let pair = DenseTensor::new(0, 2, 2, vec![1.0; 4]).unwrap();
        let sym = Graph::corolla(ones, 2, 1).vconcat(&corolla(&pair)).unwrap();
        let a = amplitude_of_unordered(&sym, &b).unwrap();
        assert!(b.eq(&a, &evaluate(&sym, &b, None).unwrap()));
        // reorder the inputs of the symmetric (2, 1) vertex
        let hub = sym.vertices().iter().position(|v| v.arity() == (2, 1)).unwrap();
        let swapped = sym.vertex_act(&Permutation::identity(1), hub, &Permutation::transposition(2, 1, 2)).unwrap();
        assert!(b.eq(&a, &amplitude_of_unordered(&swapped, &b).unwrap()));
    }
}
