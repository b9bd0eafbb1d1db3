//! The backend contract and the operations derived from it.

use std::fmt::Debug;

use crate::error::{Result, TrapError};
use crate::perm::Permutation;

/// A TRAP: spaces `P(k, l)` with actions, horizontal concatenation and
/// partial traces.
///
/// `act(σ, p, τ)` takes `σ ∈ 𝔖_l` acting on outputs and `τ ∈ 𝔖_k` acting on
/// inputs: output position `m` of the result carries output `σ⁻¹(m)` of `p`,
/// input position `m` carries input `τ(m)` of `p`.
pub trait Trap: Sync {
    type Elem: Clone + Debug + Send + Sync;

    fn name(&self) -> String;

    fn arity(&self, p: &Self::Elem) -> (usize, usize);

    fn act(&self, sigma: &Permutation, p: &Self::Elem, tau: &Permutation) -> Result<Self::Elem>;

    fn hconcat(&self, p: &Self::Elem, q: &Self::Elem) -> Result<Self::Elem>;

    /// `t_{i,j}`, 1-based.
    fn partial_trace(&self, p: &Self::Elem, i: usize, j: usize) -> Result<Self::Elem>;

    /// `I_0 ∈ P(0, 0)`.
    fn unit0(&self) -> Self::Elem;

    /// `I ∈ P(1, 1)` for unitary backends.
    fn unit1(&self) -> Option<Self::Elem> {
        None
    }

    fn eq(&self, p: &Self::Elem, q: &Self::Elem) -> bool;

    /// Relative tolerance used by [`Trap::eq`]; zero for exact backends.
    fn tolerance(&self) -> f64 {
        0.0
    }

    fn to_json(&self, p: &Self::Elem) -> serde_json::Value;

    /// Size of the index range carried by one edge, for cost estimates.
    fn edge_extent(&self) -> usize {
        1
    }

    /// Glue every `(input, output)` pair of `p` at once. Indices refer to `p`;
    /// the remaining legs keep their relative order.
    fn trace_many(&self, p: &Self::Elem, pairs: &[(usize, usize)]) -> Result<Self::Elem> {
        let (k, l) = self.arity(p);
        let mut ins: Vec<usize> = (1..=k).collect();
        let mut outs: Vec<usize> = (1..=l).collect();
        let mut cur = p.clone();
        for &(i, j) in pairs {
            let a = ins
                .iter()
                .position(|&x| x == i)
                .ok_or(TrapError::IndexOutOfRange { index: i, bound: k })?;
            let b = outs
                .iter()
                .position(|&x| x == j)
                .ok_or(TrapError::IndexOutOfRange { index: j, bound: l })?;
            cur = self.partial_trace(&cur, a + 1, b + 1)?;
            ins.remove(a);
            outs.remove(b);
        }
        Ok(cur)
    }

    /// `trace_many(p * q, pairs)`; dense backends skip the full product.
    fn contract(&self, p: &Self::Elem, q: &Self::Elem, pairs: &[(usize, usize)]) -> Result<Self::Elem> {
        self.trace_many(&self.hconcat(p, q)?, pairs)
    }
}

/// `q ∘ p = t_{k+1,1} ∘ … ∘ t_{k+l,l}(p * q)` for `p ∈ P(k,l)`, `q ∈ P(l,m)`.
pub fn vconcat<B: Trap + ?Sized>(backend: &B, q: &B::Elem, p: &B::Elem) -> Result<B::Elem> {
    let (k, l) = backend.arity(p);
    let (l2, _) = backend.arity(q);
    if l != l2 {
        return Err(TrapError::ArityMismatch(format!(
            "cannot compose: first element has {l} outputs, second has {l2} inputs"
        )));
    }
    let pairs: Vec<(usize, usize)> = (1..=l).rev().map(|j| (k + j, j)).collect();
    backend.contract(p, q, &pairs)
}

/// `Tr(p) = t_{1,1} ∘ … ∘ t_{k,k}(p)`.
pub fn gtrace<B: Trap + ?Sized>(backend: &B, p: &B::Elem) -> Result<B::Elem> {
    let (k, l) = backend.arity(p);
    if k != l {
        return Err(TrapError::ArityMismatch(format!(
            "trace needs as many inputs as outputs, got ({k}, {l})"
        )));
    }
    let mut cur = p.clone();
    for i in (1..=k).rev() {
        cur = backend.partial_trace(&cur, i, i)?;
    }
    Ok(cur)
}

/// `p₁ * p₂ * … * pₙ`, with `I_0` for the empty product.
pub fn hconcat_all<'a, B, I>(backend: &B, items: I) -> Result<B::Elem>
where
    B: Trap + ?Sized,
    B::Elem: 'a,
    I: IntoIterator<Item = &'a B::Elem>,
{
    let mut iter = items.into_iter();
    let Some(first) = iter.next() else {
        return Ok(backend.unit0());
    };
    let mut acc = first.clone();
    for x in iter {
        acc = backend.hconcat(&acc, x)?;
    }
    Ok(acc)
}

/// `p^{*n}`.
pub fn hpower<B: Trap + ?Sized>(backend: &B, p: &B::Elem, n: usize) -> Result<B::Elem> {
    let mut acc = backend.unit0();
    for _ in 0..n {
        acc = backend.hconcat(&acc, p)?;
    }
    Ok(acc)
}
