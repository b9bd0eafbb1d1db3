//! Isomorphism of corolla-ordered graphs.
//!
//! Slot orders make a connected component rigid: once one vertex is matched,
//! every neighbour and every slot is forced. Matching and canonical labelling
//! therefore only ever branch on the choice of a root per component.

use std::collections::VecDeque;

use super::{Edge, Graph, Head, Tail, Vertex, VertexId};

/// Vertices of each connected component (through internal edges), each list
/// in increasing order, components ordered by their smallest vertex.
fn components<D>(g: &Graph<D>) -> Vec<Vec<VertexId>> {
    let n = g.vertices.len();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in neighbours(g, v) {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Neighbours in slot order: in-slots first, then out-slots.
fn neighbours<D>(g: &Graph<D>, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
    let vert = &g.vertices[v];
    vert.ins
        .iter()
        .filter_map(|&e| g.edges[e].source())
        .chain(vert.outs.iter().filter_map(|&e| g.edges[e].target()))
}

fn io_pairs<D>(g: &Graph<D>) -> Vec<(usize, usize)> {
    let mut v: Vec<_> = g
        .edges
        .iter()
        .filter_map(|e| match e {
            Edge::Link {
                tail: Tail::Input(i),
                head: Head::Output(j),
            } => Some((*i, *j)),
            _ => None,
        })
        .collect();
    v.sort_unstable();
    v
}

/// Slot descriptor relative to a labelling of the vertices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Port {
    Global(usize),
    Vertex(usize, usize),
}

fn in_port<D>(g: &Graph<D>, e: usize, label: &[usize]) -> Port {
    match g.edges[e].tail() {
        Some(Tail::Input(i)) => Port::Global(i),
        Some(Tail::Vertex(u)) => {
            let s = g.vertices[u].outs.iter().position(|&x| x == e).unwrap();
            Port::Vertex(label[u], s)
        }
        None => unreachable!("loops sit in no slot"),
    }
}

fn out_port<D>(g: &Graph<D>, e: usize, label: &[usize]) -> Port {
    match g.edges[e].head() {
        Some(Head::Output(j)) => Port::Global(j),
        Some(Head::Vertex(u)) => {
            let s = g.vertices[u].ins.iter().position(|&x| x == e).unwrap();
            Port::Vertex(label[u], s)
        }
        None => unreachable!("loops sit in no slot"),
    }
}

/// Breadth-first order from `root`, visiting neighbours in slot order.
fn bfs_order<D>(g: &Graph<D>, root: VertexId) -> Vec<VertexId> {
    let mut seen = vec![false; g.vertices.len()];
    let mut order = vec![root];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for w in neighbours(g, v) {
            if !seen[w] {
                seen[w] = true;
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    order
}

type VertexCode<K> = (K, Vec<Port>, Vec<Port>);

fn rooted_code<D, K: Ord>(
    g: &Graph<D>,
    root: VertexId,
    key: &impl Fn(&D) -> K,
) -> (Vec<VertexCode<K>>, Vec<VertexId>) {
    let order = bfs_order(g, root);
    let mut label = vec![usize::MAX; g.vertices.len()];
    for (i, &v) in order.iter().enumerate() {
        label[v] = i;
    }
    let code = order
        .iter()
        .map(|&v| {
            let vert = &g.vertices[v];
            (
                key(&vert.decoration),
                vert.ins.iter().map(|&e| in_port(g, e, &label)).collect(),
                vert.outs.iter().map(|&e| out_port(g, e, &label)).collect(),
            )
        })
        .collect();
    (code, order)
}

/// Canonical representative of the isomorphism class of `g`, comparing
/// decorations through `key`.
pub fn canonical_form_by_key<D: Clone, K: Ord>(g: &Graph<D>, key: impl Fn(&D) -> K) -> Graph<D> {
    let mut comps: Vec<(Vec<VertexCode<K>>, Vec<VertexId>)> = components(g)
        .into_iter()
        .map(|members| {
            members
                .iter()
                .map(|&r| rooted_code(g, r, &key))
                .min_by(|a, b| a.0.cmp(&b.0))
                .expect("components are non-empty")
        })
        .collect();
    comps.sort_by(|a, b| a.0.cmp(&b.0));
    let order: Vec<VertexId> = comps.into_iter().flat_map(|(_, o)| o).collect();
    let mut new_id = vec![0; g.vertices.len()];
    for (i, &v) in order.iter().enumerate() {
        new_id[v] = i;
    }

    let mut edge_id = vec![usize::MAX; g.edges.len()];
    let mut edges = Vec::with_capacity(g.edges.len());
    let relabel = |e: &Edge| match *e {
        Edge::Loop => Edge::Loop,
        Edge::Link { tail, head } => Edge::Link {
            tail: match tail {
                Tail::Vertex(v) => Tail::Vertex(new_id[v]),
                t => t,
            },
            head: match head {
                Head::Vertex(v) => Head::Vertex(new_id[v]),
                h => h,
            },
        },
    };
    let mut vertices = Vec::with_capacity(order.len());
    for &v in &order {
        let vert = &g.vertices[v];
        let mut take = |e: usize| {
            if edge_id[e] == usize::MAX {
                edge_id[e] = edges.len();
                edges.push(relabel(&g.edges[e]));
            }
            edge_id[e]
        };
        let ins = vert.ins.iter().map(|&e| take(e)).collect();
        let outs = vert.outs.iter().map(|&e| take(e)).collect();
        vertices.push(Vertex {
            decoration: vert.decoration.clone(),
            ins,
            outs,
        });
    }
    for (i, j) in io_pairs(g) {
        edges.push(Edge::Link {
            tail: Tail::Input(i),
            head: Head::Output(j),
        });
    }
    edges.extend(std::iter::repeat_n(Edge::Loop, g.loop_count()));
    Graph {
        vertices,
        edges,
        k: g.k,
        l: g.l,
    }
}

/// Canonical representative: `iso_eq(g, h)` iff the canonical forms are equal.
pub fn canonical_form<D: Clone + Ord>(g: &Graph<D>) -> Graph<D> {
    canonical_form_by_key(g, |d| d.clone())
}

/// Isomorphism preserving slot orders, global indices and decorations.
pub fn iso_eq<D: PartialEq>(g: &Graph<D>, h: &Graph<D>) -> bool {
    iso_eq_by(g, h, |a, b| a == b)
}

/// As [`iso_eq`], comparing decorations with `same`.
pub fn iso_eq_by<D, E>(g: &Graph<D>, h: &Graph<E>, same: impl Fn(&D, &E) -> bool) -> bool {
    if g.k != h.k
        || g.l != h.l
        || g.vertices.len() != h.vertices.len()
        || g.edges.len() != h.edges.len()
        || g.loop_count() != h.loop_count()
        || io_pairs(g) != io_pairs(h)
    {
        return false;
    }
    let mut fwd = vec![usize::MAX; g.vertices.len()];
    let mut back = vec![usize::MAX; h.vertices.len()];
    for comp in components(g) {
        let root = comp[0];
        let free: Vec<VertexId> = (0..h.vertices.len()).filter(|&w| back[w] == usize::MAX).collect();
        let matched = free
            .into_iter()
            .any(|w| try_extend(g, h, root, w, &same, &mut fwd, &mut back));
        if !matched {
            return false;
        }
    }
    true
}

/// Tries to extend the partial bijection by the rigid match `root ↦ w`.
/// Leaves `fwd`/`back` untouched on failure.
fn try_extend<D, E>(
    g: &Graph<D>,
    h: &Graph<E>,
    root: VertexId,
    w: VertexId,
    same: &impl Fn(&D, &E) -> bool,
    fwd: &mut [usize],
    back: &mut [usize],
) -> bool {
    let mut added: Vec<(VertexId, VertexId)> = Vec::new();
    let ok = extend(g, h, root, w, same, fwd, back, &mut added);
    if !ok {
        for (a, b) in added {
            fwd[a] = usize::MAX;
            back[b] = usize::MAX;
        }
    }
    ok
}

#[allow(clippy::too_many_arguments)]
fn extend<D, E>(
    g: &Graph<D>,
    h: &Graph<E>,
    root: VertexId,
    w: VertexId,
    same: &impl Fn(&D, &E) -> bool,
    fwd: &mut [usize],
    back: &mut [usize],
    added: &mut Vec<(VertexId, VertexId)>,
) -> bool {
    let mut queue = VecDeque::new();
    let mut bind = |a: VertexId, b: VertexId, fwd: &mut [usize], back: &mut [usize], queue: &mut VecDeque<_>| {
        if fwd[a] == b && back[b] == a {
            return true;
        }
        if fwd[a] != usize::MAX || back[b] != usize::MAX {
            return false;
        }
        fwd[a] = b;
        back[b] = a;
        added.push((a, b));
        queue.push_back((a, b));
        true
    };
    if !bind(root, w, fwd, back, &mut queue) {
        return false;
    }
    while let Some((a, b)) = queue.pop_front() {
        let va = &g.vertices[a];
        let vb = &h.vertices[b];
        if va.ins.len() != vb.ins.len() || va.outs.len() != vb.outs.len() || !same(&va.decoration, &vb.decoration) {
            return false;
        }
        for (&ea, &eb) in va.ins.iter().zip(&vb.ins) {
            match (g.edges[ea].tail(), h.edges[eb].tail()) {
                (Some(Tail::Input(i)), Some(Tail::Input(j))) if i == j => {}
                (Some(Tail::Vertex(u)), Some(Tail::Vertex(x))) => {
                    let su = g.vertices[u].outs.iter().position(|&e| e == ea);
                    let sx = h.vertices[x].outs.iter().position(|&e| e == eb);
                    if su != sx || !bind(u, x, fwd, back, &mut queue) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        for (&ea, &eb) in va.outs.iter().zip(&vb.outs) {
            match (g.edges[ea].head(), h.edges[eb].head()) {
                (Some(Head::Output(i)), Some(Head::Output(j))) if i == j => {}
                (Some(Head::Vertex(u)), Some(Head::Vertex(x))) => {
                    let su = g.vertices[u].ins.iter().position(|&e| e == ea);
                    let sx = h.vertices[x].ins.iter().position(|&e| e == eb);
                    if su != sx || !bind(u, x, fwd, back, &mut queue) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    type G = Graph<&'static str>;

    fn chain() -> G {
        let g = G::corolla("x", 1, 2).hconcat(&G::corolla("y", 2, 1));
        g.partial_trace(2, 1).unwrap()
    }

    /// Reverses the vertex numbering and the edge numbering.
    fn relabel(g: &G) -> G {
        let nv = g.vertices().len();
        let ne = g.edges().len();
        let (vs, es) = g.clone().into_parts();
        let vmap = |v: usize| nv - 1 - v;
        let emap = |e: usize| ne - 1 - e;
        let mut vertices: Vec<_> = vs
            .into_iter()
            .map(|v| Vertex {
                decoration: v.decoration,
                ins: v.ins.into_iter().map(emap).collect(),
                outs: v.outs.into_iter().map(emap).collect(),
            })
            .collect();
        vertices.reverse();
        let mut edges: Vec<_> = es
            .into_iter()
            .map(|e| match e {
                Edge::Loop => Edge::Loop,
                Edge::Link { tail, head } => Edge::Link {
                    tail: match tail {
                        Tail::Vertex(v) => Tail::Vertex(vmap(v)),
                        t => t,
                    },
                    head: match head {
                        Head::Vertex(v) => Head::Vertex(vmap(v)),
                        h => h,
                    },
                },
            })
            .collect();
        edges.reverse();
        G::from_parts(vertices, edges).unwrap()
    }

    #[test]
    fn relabelling_is_invisible() {
        let g = chain().hconcat(&G::loop_graph()).hconcat(&G::unit());
        let h = relabel(&g);
        assert_ne!(g, h);
        assert!(iso_eq(&g, &h));
        assert_eq!(canonical_form(&g), canonical_form(&h));
    }

    #[test]
    fn decorations_matter() {
        assert!(!iso_eq(&G::corolla("x", 1, 1), &G::corolla("y", 1, 1)));
        assert_ne!(canonical_form(&G::corolla("x", 1, 1)), canonical_form(&G::corolla("y", 1, 1)));
    }

    #[test]
    fn hconcat_is_not_commutative_until_acted_on() {
        let g = G::corolla("x", 1, 1);
        let h = G::corolla("y", 2, 1);
        let gh = g.hconcat(&h);
        let hg = h.hconcat(&g);
        assert!(!iso_eq(&gh, &hg));
        let (k, l) = g.arity();
        let (k2, l2) = h.arity();
        let lhs = gh.act(&Permutation::block_shuffle(l, l2), &Permutation::identity(k + k2)).unwrap();
        let rhs = hg.act(&Permutation::identity(l + l2), &Permutation::block_shuffle(k, k2)).unwrap();
        assert!(iso_eq(&lhs, &rhs));
    }

    #[test]
    fn swapped_components_match() {
        let a = G::corolla("x", 0, 0);
        let b = G::corolla("y", 0, 0);
        assert!(iso_eq(&a.hconcat(&b), &b.hconcat(&a)));
        assert!(!iso_eq(&a.hconcat(&a), &a.hconcat(&b)));
        assert_eq!(canonical_form(&a.hconcat(&b)), canonical_form(&b.hconcat(&a)));
    }

    #[test]
    fn slot_order_is_part_of_the_structure() {
        // two parallel edges between x and y, crossed or not
        let base = G::corolla("x", 0, 2).hconcat(&G::corolla("y", 2, 0));
        let straight = base.partial_trace(1, 1).unwrap().partial_trace(1, 1).unwrap();
        let crossed = base.partial_trace(2, 1).unwrap().partial_trace(1, 1).unwrap();
        assert!(!iso_eq(&straight, &crossed));
        assert_ne!(canonical_form(&straight), canonical_form(&crossed));
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let g = chain().hconcat(&chain()).hconcat(&G::loop_graph());
        let c = canonical_form(&g);
        assert_eq!(canonical_form(&c), c);
        assert!(iso_eq(&c, &g));
    }
}
