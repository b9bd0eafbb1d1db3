//! Random graphs for property tests and the axiom harness.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Edge, Graph, Head, Tail, Vertex};

#[derive(Clone, Copy, Debug)]
pub struct RandomGraphOptions {
    pub max_vertices: usize,
    pub max_vertex_arity: usize,
    pub max_loops: usize,
    /// Allow input-output edges and loops.
    pub unitary: bool,
}

impl Default for RandomGraphOptions {
    fn default() -> Self {
        Self {
            max_vertices: 3,
            max_vertex_arity: 3,
            max_loops: 1,
            unitary: true,
        }
    }
}

impl RandomGraphOptions {
    pub fn solar() -> Self {
        Self {
            unitary: false,
            max_loops: 0,
            ..Self::default()
        }
    }
}

/// A random graph with `k` inputs and `l` outputs, decorating each vertex by
/// `decorate(rng, in_arity, out_arity)`.
///
/// Vertex arities are drawn first, then padded until the tails (vertex
/// outputs and global inputs) balance the heads; tails and heads are then
/// paired by a uniform random bijection.
pub fn random_graph<R: Rng + ?Sized, D>(
    rng: &mut R,
    k: usize,
    l: usize,
    opts: &RandomGraphOptions,
    mut decorate: impl FnMut(&mut R, usize, usize) -> D,
) -> Graph<D> {
    let cap = opts.max_vertex_arity.max(1);
    let min_vertices = usize::from(!opts.unitary && (k > 0 || l > 0));
    let nv = rng.gen_range(min_vertices..=opts.max_vertices.max(min_vertices));
    let mut arities: Vec<(usize, usize)> = (0..nv)
        .map(|_| (rng.gen_range(0..=opts.max_vertex_arity), rng.gen_range(0..=opts.max_vertex_arity)))
        .collect();

    let grow = |arities: &mut Vec<(usize, usize)>, rng: &mut R, input_side: bool| {
        let open: Vec<usize> = (0..arities.len())
            .filter(|&v| if input_side { arities[v].0 < cap } else { arities[v].1 < cap })
            .collect();
        match open.choose(rng) {
            Some(&v) if input_side => arities[v].0 += 1,
            Some(&v) => arities[v].1 += 1,
            None => arities.push(if input_side { (1, 0) } else { (0, 1) }),
        }
    };
    if !opts.unitary {
        while arities.iter().map(|a| a.0).sum::<usize>() < k {
            grow(&mut arities, rng, true);
        }
        while arities.iter().map(|a| a.1).sum::<usize>() < l {
            grow(&mut arities, rng, false);
        }
    }
    loop {
        let tails = arities.iter().map(|a| a.1).sum::<usize>() + k;
        let heads = arities.iter().map(|a| a.0).sum::<usize>() + l;
        if tails == heads {
            break;
        }
        grow(&mut arities, rng, tails > heads);
    }

    let mut tails: Vec<Tail> = (1..=k).map(Tail::Input).collect();
    let mut heads: Vec<Head> = (1..=l).map(Head::Output).collect();
    for (v, &(i, o)) in arities.iter().enumerate() {
        tails.extend(std::iter::repeat_n(Tail::Vertex(v), o));
        heads.extend(std::iter::repeat_n(Head::Vertex(v), i));
    }
    heads.shuffle(rng);
    if !opts.unitary {
        // swap heads until no input meets an output directly
        while let Some(a) = (0..k).find(|&a| matches!(heads[a], Head::Output(_))) {
            let b = (k..tails.len())
                .find(|&b| matches!(heads[b], Head::Vertex(_)))
                .expect("enough vertex inputs to absorb the global inputs");
            heads.swap(a, b);
        }
    }

    let mut edges: Vec<Edge> = tails
        .iter()
        .zip(&heads)
        .map(|(&tail, &head)| Edge::Link { tail, head })
        .collect();
    // slot order: the order in which edges were assigned, then shuffled
    let mut ins: Vec<Vec<usize>> = vec![Vec::new(); arities.len()];
    let mut outs: Vec<Vec<usize>> = vec![Vec::new(); arities.len()];
    for (e, edge) in edges.iter().enumerate() {
        if let Some(v) = edge.source() {
            outs[v].push(e);
        }
        if let Some(v) = edge.target() {
            ins[v].push(e);
        }
    }
    for slots in ins.iter_mut().chain(outs.iter_mut()) {
        slots.shuffle(rng);
    }
    if opts.unitary && opts.max_loops > 0 {
        let loops = rng.gen_range(0..=opts.max_loops);
        edges.extend(std::iter::repeat_n(Edge::Loop, loops));
    }
    let vertices = arities
        .iter()
        .zip(ins.into_iter().zip(outs))
        .map(|(&(i, o), (ins, outs))| Vertex {
            decoration: decorate(rng, i, o),
            ins,
            outs,
        })
        .collect();
    Graph::from_parts(vertices, edges).expect("random construction is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_solar;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn arities_and_validity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let k = rng.gen_range(0..5);
            let l = rng.gen_range(0..5);
            let g = random_graph(&mut rng, k, l, &RandomGraphOptions::default(), |_, _, _| 'x');
            assert_eq!(g.arity(), (k, l));
            for v in g.vertices() {
                assert!(v.ins.len() <= 3 && v.outs.len() <= 3);
            }
        }
    }

    #[test]
    fn solar_option_gives_solar_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let k = rng.gen_range(0..5);
            let l = rng.gen_range(0..5);
            let g = random_graph(&mut rng, k, l, &RandomGraphOptions::solar(), |_, _, _| 'x');
            assert_eq!(g.arity(), (k, l));
            assert!(is_solar(&g));
        }
    }

    #[test]
    fn decorations_see_vertex_arity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_graph(&mut rng, 2, 3, &RandomGraphOptions::default(), |_, i, o| (i, o));
        for v in g.vertices() {
            assert_eq!(v.decoration, v.arity());
        }
    }
}
