//! Splitting a graph into loops, identity wires, a shuffle and a solar core.

use super::{Edge, Graph, Head, Tail};
use crate::perm::Permutation;

/// `G = 𝒪^{loop_count} * act(sh_out, core * I^{wire_count}, sh_in⁻¹)`.
///
/// `sh_in` sends the core inputs (positions `1..=k′`) and then the wires to
/// their global input indices, and is a shuffle. `sh_out` does the same for
/// outputs; it increases on the core block, while its wire block lists the
/// wires' output indices in the order of their input indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolarDecomposition<D> {
    pub core: Graph<D>,
    pub sh_in: Permutation,
    pub sh_out: Permutation,
    pub wire_count: usize,
    pub loop_count: usize,
}

/// No input-output edges and no loops.
pub fn is_solar<D>(g: &Graph<D>) -> bool {
    g.edges().iter().all(|e| match e {
        Edge::Loop => false,
        Edge::Link { tail, head } => !matches!((tail, head), (Tail::Input(_), Head::Output(_))),
    })
}

pub fn solar_decompose<D: Clone>(g: &Graph<D>) -> SolarDecomposition<D> {
    let (k, l) = g.arity();
    let mut wires: Vec<(usize, usize)> = Vec::new();
    let mut loops = 0;
    let mut is_wire_in = vec![false; k + 1];
    let mut is_wire_out = vec![false; l + 1];
    for e in g.edges() {
        match e {
            Edge::Loop => loops += 1,
            Edge::Link {
                tail: Tail::Input(i),
                head: Head::Output(j),
            } => {
                wires.push((*i, *j));
                is_wire_in[*i] = true;
                is_wire_out[*j] = true;
            }
            _ => {}
        }
    }
    wires.sort_unstable();
    let core_ins: Vec<usize> = (1..=k).filter(|&i| !is_wire_in[i]).collect();
    let core_outs: Vec<usize> = (1..=l).filter(|&j| !is_wire_out[j]).collect();
    let mut in_rank = vec![0; k + 1];
    for (r, &i) in core_ins.iter().enumerate() {
        in_rank[i] = r + 1;
    }
    let mut out_rank = vec![0; l + 1];
    for (r, &j) in core_outs.iter().enumerate() {
        out_rank[j] = r + 1;
    }

    let (vertices, edges) = g.clone().into_parts();
    let kept: Vec<Option<Edge>> = edges
        .into_iter()
        .map(|e| match e.kind() {
            super::EdgeKind::Loop | super::EdgeKind::Io => None,
            _ => Some(e.map_indices(|i| in_rank[i], |j| out_rank[j])),
        })
        .collect();
    let core = Graph::compact(vertices, kept, core_ins.len(), core_outs.len());

    let mut in_word = core_ins.clone();
    in_word.extend(wires.iter().map(|w| w.0));
    let mut out_word = core_outs.clone();
    out_word.extend(wires.iter().map(|w| w.1));
    SolarDecomposition {
        core,
        sh_in: Permutation::from_images(&in_word).expect("indices form a bijection"),
        sh_out: Permutation::from_images(&out_word).expect("indices form a bijection"),
        wire_count: wires.len(),
        loop_count: loops,
    }
}

impl<D: Clone> SolarDecomposition<D> {
    pub fn reassemble(&self) -> Graph<D> {
        let inner = self.core.hconcat(&Graph::unit().power(self.wire_count));
        let placed = inner
            .act(&self.sh_out, &self.sh_in.inverse())
            .expect("degrees agree by construction");
        Graph::loop_graph().power(self.loop_count).hconcat(&placed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::iso_eq;

    type G = Graph<&'static str>;

    fn p(w: &[usize]) -> Permutation {
        Permutation::from_images(w).unwrap()
    }

    #[test]
    fn corolla_is_its_own_core() {
        let c = G::corolla("x", 2, 3);
        assert!(is_solar(&c));
        let d = solar_decompose(&c);
        assert_eq!(d.core, c);
        assert!(d.sh_in.is_identity() && d.sh_out.is_identity());
        assert_eq!((d.wire_count, d.loop_count), (0, 0));
    }

    #[test]
    fn unit_is_one_wire() {
        let d = solar_decompose(&G::unit());
        assert!(!is_solar(&G::unit()));
        assert_eq!(d.core, G::empty());
        assert_eq!(d.wire_count, 1);
        assert!(iso_eq(&d.reassemble(), &G::unit()));
    }

    /// Two vertices `a → b` and `b → a`; `a` feeds outputs 1 and 3, `b` is fed
    /// by inputs 3 and 2 in that slot order; input 1 runs straight to output 2;
    /// two loops.
    fn worked_example() -> G {
        // a: in-slot from b, out-slots [out 1, to b, out 3]
        // b: in-slots [in 3, in 2, from a], out-slot to a
        let vertices = vec![
            super::super::Vertex { decoration: "a", ins: vec![0], outs: vec![1, 2, 3] },
            super::super::Vertex { decoration: "b", ins: vec![4, 5, 2], outs: vec![0] },
        ];
        let edges = vec![
            Edge::Link { tail: Tail::Vertex(1), head: Head::Vertex(0) },
            Edge::Link { tail: Tail::Vertex(0), head: Head::Output(1) },
            Edge::Link { tail: Tail::Vertex(0), head: Head::Vertex(1) },
            Edge::Link { tail: Tail::Vertex(0), head: Head::Output(3) },
            Edge::Link { tail: Tail::Input(3), head: Head::Vertex(1) },
            Edge::Link { tail: Tail::Input(2), head: Head::Vertex(1) },
            Edge::Link { tail: Tail::Input(1), head: Head::Output(2) },
            Edge::Loop,
            Edge::Loop,
        ];
        G::from_parts(vertices, edges).unwrap()
    }

    #[test]
    fn worked_example_shuffles() {
        let g = worked_example();
        let d = solar_decompose(&g);
        assert_eq!(d.sh_in, p(&[2, 3, 1]));
        assert_eq!(d.sh_out, p(&[1, 3, 2]));
        assert_eq!(d.loop_count, 2);
        assert_eq!(d.wire_count, 1);
        assert_eq!(d.core.arity(), (2, 2));
        assert!(is_solar(&d.core));
        // b's first two in-slots read core inputs 2 and 1
        let b = &d.core.vertices()[1];
        let idx: Vec<_> = b.ins[..2].iter().map(|&e| d.core.edges()[e].in_index().unwrap()).collect();
        assert_eq!(idx, vec![2, 1]);
        assert!(iso_eq(&d.reassemble(), &g));
    }

    #[test]
    fn crossed_wires_go_into_sh_out() {
        let crossed = G::unit()
            .power(2)
            .act(&p(&[2, 1]), &Permutation::identity(2))
            .unwrap();
        let d = solar_decompose(&crossed);
        assert_eq!(d.sh_in, Permutation::identity(2));
        assert_eq!(d.sh_out, p(&[2, 1]));
        assert!(iso_eq(&d.reassemble(), &crossed));
    }
}
