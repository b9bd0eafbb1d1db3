//! The unitary completion `uPGr(P)` of a TRAP `P`.
//!
//! An element is `𝒪^n * act(sh_out, core * I^w, sh_in⁻¹)`: a core element
//! of `P`, `w` identity wires and `n` formal loops. The loop `𝒪 = t_{1,1}(I)`
//! stays symbolic.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{check_index, Result, TrapError};
use crate::graph::{solar_decompose, Graph};
use crate::perm::Permutation;
use crate::trapcore::{hpower, Trap};

/// Normal form of an element of `uPGr(P)`.
///
/// Global input `sh_in(m)` is core input `m` for `m ≤ k′` and wire `m − k′`
/// otherwise; outputs likewise through `sh_out`. `sh_in` is a shuffle, so
/// core inputs and wires appear in increasing order; `sh_out` increases on
/// the core block and its wire block records where each wire ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UElement<E> {
    pub k: usize,
    pub l: usize,
    pub core: E,
    pub sh_in: Permutation,
    pub sh_out: Permutation,
    pub loop_count: usize,
}

/// An element in unnormalized form: the core's legs carry arbitrary global
/// indices and wires are listed as `(input, output)` pairs.
struct Placed<E> {
    k: usize,
    l: usize,
    core: E,
    gin: Vec<usize>,
    gout: Vec<usize>,
    wires: Vec<(usize, usize)>,
    loops: usize,
}

/// `uPGr(B)`.
#[derive(Clone, Debug)]
pub struct UTrap<B> {
    base: B,
}

impl<B: Trap> UTrap<B> {
    pub fn new(base: B) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    /// `ι(p)`: no wires, no loops, identity shuffles.
    pub fn embed(&self, p: &B::Elem) -> UElement<B::Elem> {
        let (k, l) = self.base.arity(p);
        UElement {
            k,
            l,
            core: p.clone(),
            sh_in: Permutation::identity(k),
            sh_out: Permutation::identity(l),
            loop_count: 0,
        }
    }

    /// The identity wire `I`.
    pub fn u_unit(&self) -> UElement<B::Elem> {
        UElement {
            k: 1,
            l: 1,
            core: self.base.unit0(),
            sh_in: Permutation::identity(1),
            sh_out: Permutation::identity(1),
            loop_count: 0,
        }
    }

    /// The formal loop `𝒪`.
    pub fn u_loop(&self) -> UElement<B::Elem> {
        UElement {
            loop_count: 1,
            ..self.embed(&self.base.unit0())
        }
    }

    fn core_arity(&self, u: &UElement<B::Elem>) -> (usize, usize) {
        self.base.arity(&u.core)
    }

    fn place(&self, u: &UElement<B::Elem>) -> Placed<B::Elem> {
        let (kc, lc) = self.core_arity(u);
        let w = u.k - kc;
        Placed {
            k: u.k,
            l: u.l,
            core: u.core.clone(),
            gin: (1..=kc).map(|m| u.sh_in.image(m)).collect(),
            gout: (1..=lc).map(|m| u.sh_out.image(m)).collect(),
            wires: (1..=w).map(|m| (u.sh_in.image(kc + m), u.sh_out.image(lc + m))).collect(),
            loops: u.loop_count,
        }
    }

    fn normalize(&self, p: Placed<B::Elem>) -> Result<UElement<B::Elem>> {
        let ranked = |g: &[usize]| {
            let mut ord: Vec<usize> = (1..=g.len()).collect();
            ord.sort_by_key(|&m| g[m - 1]);
            ord
        };
        let ord_in = ranked(&p.gin);
        let ord_out = ranked(&p.gout);
        let tau = Permutation::from_images(&ord_in)?;
        let sigma = Permutation::from_images(&ord_out)?.inverse();
        let core = if tau.is_identity() && sigma.is_identity() {
            p.core
        } else {
            self.base.act(&sigma, &p.core, &tau)?
        };
        let mut wires = p.wires;
        wires.sort_unstable();
        let in_word: Vec<usize> = ord_in.iter().map(|&m| p.gin[m - 1]).chain(wires.iter().map(|w| w.0)).collect();
        let out_word: Vec<usize> = ord_out.iter().map(|&m| p.gout[m - 1]).chain(wires.iter().map(|w| w.1)).collect();
        Ok(UElement {
            k: p.k,
            l: p.l,
            core,
            sh_in: Permutation::from_images(&in_word)?,
            sh_out: Permutation::from_images(&out_word)?,
            loop_count: p.loops,
        })
    }

    /// Checks the normal-form invariants of a deserialized element.
    pub fn validate(&self, u: &UElement<B::Elem>) -> Result<()> {
        let (kc, lc) = self.core_arity(u);
        if u.sh_in.degree() != u.k || u.sh_out.degree() != u.l {
            return Err(TrapError::InvalidData("shuffle degrees differ from the arity".into()));
        }
        if kc > u.k || lc > u.l || u.k - kc != u.l - lc {
            return Err(TrapError::InvalidData(format!(
                "core arity ({kc}, {lc}) does not fit ({}, {}) with matching wires",
                u.k, u.l
            )));
        }
        let increasing = |p: &Permutation, from: usize, to: usize| (from..to).all(|m| p.image(m) < p.image(m + 1));
        if !increasing(&u.sh_in, 1, kc) || !increasing(&u.sh_in, kc + 1, u.k) {
            return Err(TrapError::InvalidData("sh_in is not a shuffle".into()));
        }
        if !increasing(&u.sh_out, 1, lc) {
            return Err(TrapError::InvalidData("sh_out does not increase on the core block".into()));
        }
        Ok(())
    }

    pub fn from_value(&self, v: Value) -> Result<UElement<B::Elem>>
    where
        B::Elem: for<'de> Deserialize<'de>,
    {
        let u: UElement<B::Elem> = serde_json::from_value(v).map_err(|e| TrapError::InvalidData(e.to_string()))?;
        self.validate(&u)?;
        Ok(u)
    }

    /// Random element with `k` inputs and `l` outputs: a core from `gen`,
    /// up to `min(k, l)` wires placed at random, and up to two loops.
    pub fn random_element<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        k: usize,
        l: usize,
        gen: impl FnOnce(&mut R, usize, usize) -> B::Elem,
    ) -> UElement<B::Elem> {
        let w = rng.gen_range(0..=k.min(l));
        let core = gen(rng, k - w, l - w);
        let mut ins: Vec<usize> = (1..=k).collect();
        let mut outs: Vec<usize> = (1..=l).collect();
        ins.shuffle(rng);
        outs.shuffle(rng);
        let wires = ins[k - w..].iter().copied().zip(outs[l - w..].iter().copied()).collect();
        let placed = Placed {
            k,
            l,
            core,
            gin: ins[..k - w].to_vec(),
            gout: outs[..l - w].to_vec(),
            wires,
            loops: rng.gen_range(0..=2),
        };
        self.normalize(placed).expect("random placement is a bijection")
    }

    /// The map `uPGr(P) → Q` induced by a morphism `θ: P → Q` into a unitary
    /// `Q`: `t_{1,1}(I)^n * act(sh_out, θ(core) * I^w, sh_in⁻¹)`.
    pub fn induced<Q: Trap>(&self, q: &Q, theta: impl Fn(&B::Elem) -> Result<Q::Elem>, u: &UElement<B::Elem>) -> Result<Q::Elem> {
        let unit = q.unit1().ok_or(TrapError::NotUnitary)?;
        let w = u.k - self.core_arity(u).0;
        let inner = q.hconcat(&theta(&u.core)?, &hpower(q, &unit, w)?)?;
        let body = q.act(&u.sh_out, &inner, &u.sh_in.inverse())?;
        let loops = hpower(q, &q.partial_trace(&unit, 1, 1)?, u.loop_count)?;
        q.hconcat(&loops, &body)
    }
}

impl<D: Clone> UTrap<crate::graph::GraphTrap<D>>
where
    crate::graph::GraphTrap<D>: Trap<Elem = Graph<D>>,
{
    /// The class `[G]` of a graph: its solar decomposition.
    pub fn from_graph(&self, g: &Graph<D>) -> UElement<Graph<D>> {
        let d = solar_decompose(g);
        let (k, l) = g.arity();
        UElement {
            k,
            l,
            core: d.core,
            sh_in: d.sh_in,
            sh_out: d.sh_out,
            loop_count: d.loop_count,
        }
    }
}

impl<B: Trap> Trap for UTrap<B> {
    type Elem = UElement<B::Elem>;

    fn name(&self) -> String {
        format!("upgr({})", self.base.name())
    }

    fn arity(&self, u: &Self::Elem) -> (usize, usize) {
        (u.k, u.l)
    }

    fn act(&self, sigma: &Permutation, u: &Self::Elem, tau: &Permutation) -> Result<Self::Elem> {
        if sigma.degree() != u.l {
            return Err(TrapError::DegreeMismatch { expected: u.l, got: sigma.degree() });
        }
        if tau.degree() != u.k {
            return Err(TrapError::DegreeMismatch { expected: u.k, got: tau.degree() });
        }
        let mut p = self.place(u);
        let ti = |i: usize| tau.preimage(i);
        let so = |j: usize| sigma.image(j);
        p.gin.iter_mut().for_each(|i| *i = ti(*i));
        p.gout.iter_mut().for_each(|j| *j = so(*j));
        p.wires.iter_mut().for_each(|(i, j)| (*i, *j) = (ti(*i), so(*j)));
        self.normalize(p)
    }

    fn hconcat(&self, u: &Self::Elem, v: &Self::Elem) -> Result<Self::Elem> {
        let (pu, pv) = (self.place(u), self.place(v));
        let placed = Placed {
            k: u.k + v.k,
            l: u.l + v.l,
            core: self.base.hconcat(&pu.core, &pv.core)?,
            gin: pu.gin.into_iter().chain(pv.gin.iter().map(|i| i + u.k)).collect(),
            gout: pu.gout.into_iter().chain(pv.gout.iter().map(|j| j + u.l)).collect(),
            wires: pu.wires.into_iter().chain(pv.wires.iter().map(|&(i, j)| (i + u.k, j + u.l))).collect(),
            loops: pu.loops + pv.loops,
        };
        self.normalize(placed)
    }

    fn partial_trace(&self, u: &Self::Elem, i: usize, j: usize) -> Result<Self::Elem> {
        check_index(i, u.k)?;
        check_index(j, u.l)?;
        let mut p = self.place(u);
        let core_in = p.gin.iter().position(|&x| x == i);
        let core_out = p.gout.iter().position(|&x| x == j);
        let wire_in = p.wires.iter().position(|w| w.0 == i);
        let wire_out = p.wires.iter().position(|w| w.1 == j);
        match (core_in, wire_in, core_out, wire_out) {
            (_, Some(a), _, Some(b)) if a == b => {
                p.wires.remove(a);
                p.loops += 1;
            }
            (_, Some(a), _, Some(b)) => {
                let (from, to) = (p.wires[b].0, p.wires[a].1);
                p.wires[a] = (from, to);
                p.wires.remove(b);
            }
            (_, Some(a), Some(b), _) => {
                p.gout[b] = p.wires[a].1;
                p.wires.remove(a);
            }
            (Some(a), _, _, Some(b)) => {
                p.gin[a] = p.wires[b].0;
                p.wires.remove(b);
            }
            (Some(a), _, Some(b), _) => {
                p.core = self.base.partial_trace(&p.core, a + 1, b + 1)?;
                p.gin.remove(a);
                p.gout.remove(b);
            }
            _ => unreachable!("every global leg belongs to the core or to a wire"),
        }
        let down = |x: &mut usize, cut: usize| {
            if *x > cut {
                *x -= 1;
            }
        };
        p.gin.iter_mut().for_each(|x| down(x, i));
        p.gout.iter_mut().for_each(|x| down(x, j));
        p.wires.iter_mut().for_each(|(a, b)| {
            down(a, i);
            down(b, j);
        });
        p.k -= 1;
        p.l -= 1;
        self.normalize(p)
    }

    fn unit0(&self) -> Self::Elem {
        self.embed(&self.base.unit0())
    }

    fn unit1(&self) -> Option<Self::Elem> {
        Some(self.u_unit())
    }

    fn eq(&self, u: &Self::Elem, v: &Self::Elem) -> bool {
        (u.k, u.l, u.loop_count) == (v.k, v.l, v.loop_count)
            && u.sh_in == v.sh_in
            && u.sh_out == v.sh_out
            && self.base.arity(&u.core) == self.base.arity(&v.core)
            && self.base.eq(&u.core, &v.core)
    }

    fn tolerance(&self) -> f64 {
        self.base.tolerance()
    }

    fn to_json(&self, u: &Self::Elem) -> Value {
        serde_json::json!({
            "k": u.k,
            "l": u.l,
            "core": self.base.to_json(&u.core),
            "sh_in": u.sh_in,
            "sh_out": u.sh_out,
            "loop_count": u.loop_count,
        })
    }
}
