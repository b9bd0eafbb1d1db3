//! Dense multi-axis arrays shared by the tensor and kernel backends.
//!
//! An element of arity `(k, l)` is stored row-major with `k + l` axes of a
//! common extent, inputs first. Every operation reduces to [`contract`]:
//! the outer product of two arrays followed by a set of input/output
//! contractions, each weighted by a quadrature factor.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Result, TrapError};
use crate::perm::Permutation;

/// Field of coefficients.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + Serialize
    + DeserializeOwned
    + 'static
{
    const ZERO: Self;
    const ONE: Self;
    fn norm(self) -> f64;
    fn from_f64(x: f64) -> Self;
    fn is_finite(self) -> bool;
    /// Uniform on `[-1, 1]` (componentwise for complex values).
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    fn norm(self) -> f64 {
        self.abs()
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen_range(-1.0..=1.0)
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    const ONE: Self = Complex64::new(1.0, 0.0);

    fn norm(self) -> f64 {
        Complex64::norm(self)
    }

    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
    }
}

/// Entries beyond this count are refused rather than allocated.
pub(crate) const MAX_ENTRIES: usize = 1 << 27;

pub(crate) fn entry_count(ext: usize, axes: usize) -> Result<usize> {
    u32::try_from(axes)
        .ok()
        .and_then(|a| ext.checked_pow(a))
        .filter(|&n| n <= MAX_ENTRIES)
        .ok_or_else(|| TrapError::InvalidData(format!("{ext}^{axes} entries is too large")))
}

fn strides(axes: usize, ext: usize) -> Vec<usize> {
    let mut s = vec![1; axes];
    for a in (0..axes.saturating_sub(1)).rev() {
        s[a] = s[a + 1] * ext;
    }
    s
}

/// Which operand an axis of the outer product belongs to, with its stride.
#[derive(Clone, Copy)]
struct Leg {
    sa: usize,
    sb: usize,
}

/// `trace_many(a * b, pairs)` without forming `a * b`.
///
/// `pairs` are `(input, output)` indices of the product `a * b` (1-based).
/// Each contraction is multiplied by `weight`. The surviving legs keep their
/// order in the product.
#[allow(clippy::too_many_arguments)]
pub(crate) fn contract<S: Scalar>(
    a: &[S],
    (ka, la): (usize, usize),
    b: &[S],
    (kb, lb): (usize, usize),
    ext: usize,
    pairs: &[(usize, usize)],
    weight: f64,
) -> Result<Vec<S>> {
    let sa = strides(ka + la, ext);
    let sb = strides(kb + lb, ext);
    let leg_in = |i: usize| {
        if i <= ka {
            Leg { sa: sa[i - 1], sb: 0 }
        } else {
            Leg { sa: 0, sb: sb[i - ka - 1] }
        }
    };
    let leg_out = |j: usize| {
        if j <= la {
            Leg { sa: sa[ka + j - 1], sb: 0 }
        } else {
            Leg { sa: 0, sb: sb[kb + j - la - 1] }
        }
    };
    let (k, l) = (ka + kb, la + lb);
    let mut used_in = vec![false; k + 1];
    let mut used_out = vec![false; l + 1];
    let mut summed = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        if i == 0 || i > k || used_in[i] {
            return Err(TrapError::IndexOutOfRange { index: i, bound: k });
        }
        if j == 0 || j > l || used_out[j] {
            return Err(TrapError::IndexOutOfRange { index: j, bound: l });
        }
        used_in[i] = true;
        used_out[j] = true;
        let (x, y) = (leg_in(i), leg_out(j));
        summed.push(Leg {
            sa: x.sa + y.sa,
            sb: x.sb + y.sb,
        });
    }
    let kept: Vec<Leg> = (1..=k)
        .filter(|&i| !used_in[i])
        .map(leg_in)
        .chain((1..=l).filter(|&j| !used_out[j]).map(leg_out))
        .collect();

    let out_len = entry_count(ext, kept.len())?;
    let sum_len = entry_count(ext, summed.len())?;
    let offsets = |legs: &[Leg], n: usize| -> Vec<(usize, usize)> {
        (0..n)
            .map(|mut r| {
                let mut off = (0, 0);
                for leg in legs.iter().rev() {
                    let d = r % ext;
                    r /= ext;
                    off.0 += d * leg.sa;
                    off.1 += d * leg.sb;
                }
                off
            })
            .collect()
    };
    let inner = offsets(&summed, sum_len);
    let factor = S::from_f64(weight.powi(summed.len() as i32));
    // the last kept leg runs fastest; each block of `ext` results shares
    // the offsets of the other kept legs
    let (last, outer) = match kept.split_last() {
        Some((&last, outer)) => (last, outer),
        None => (Leg { sa: 0, sb: 0 }, &[][..]),
    };
    let block = if kept.is_empty() { 1 } else { ext };
    let fill = |o: usize, dst: &mut [S]| {
        let mut rr = o;
        let (mut oa, mut ob) = (0, 0);
        for leg in outer.iter().rev() {
            let d = rr % ext;
            rr /= ext;
            oa += d * leg.sa;
            ob += d * leg.sb;
        }
        for (d, slot) in dst.iter_mut().enumerate() {
            let (pa, pb) = (oa + d * last.sa, ob + d * last.sb);
            let mut acc = S::ZERO;
            for &(ia, ib) in &inner {
                acc += a[pa + ia] * b[pb + ib];
            }
            *slot = if summed.is_empty() { acc } else { acc * factor };
        }
    };
    let mut out = vec![S::ZERO; out_len];
    if out_len.saturating_mul(sum_len) >= 1 << 15 {
        out.par_chunks_mut(block).enumerate().for_each(|(o, dst)| fill(o, dst));
    } else {
        out.chunks_mut(block).enumerate().for_each(|(o, dst)| fill(o, dst));
    }
    Ok(out)
}

/// Input position `m` takes old input `τ(m)`, output position `m` takes old
/// output `σ⁻¹(m)`.
pub(crate) fn act<S: Scalar>(data: &[S], k: usize, l: usize, ext: usize, sigma: &Permutation, tau: &Permutation) -> Result<Vec<S>> {
    if sigma.degree() != l {
        return Err(TrapError::DegreeMismatch {
            expected: l,
            got: sigma.degree(),
        });
    }
    if tau.degree() != k {
        return Err(TrapError::DegreeMismatch {
            expected: k,
            got: tau.degree(),
        });
    }
    if sigma.is_identity() && tau.is_identity() {
        return Ok(data.to_vec());
    }
    let old = strides(k + l, ext);
    let src: Vec<usize> = (1..=k)
        .map(|m| old[tau.image(m) - 1])
        .chain((1..=l).map(|m| old[k + sigma.preimage(m) - 1]))
        .collect();
    let (last, outer) = src.split_last().expect("k + l > 0 for a non-identity action");
    let mut out = Vec::with_capacity(data.len());
    for o in 0..data.len() / ext {
        let mut rr = o;
        let mut off = 0;
        for s in outer.iter().rev() {
            off += (rr % ext) * s;
            rr /= ext;
        }
        out.extend((0..ext).map(|d| data[off + d * last]));
    }
    Ok(out)
}

/// `max |a − b| ≤ tol · max(1, max |a|, max |b|)`.
pub(crate) fn close<S: Scalar>(a: &[S], b: &[S], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut diff = 0.0f64;
    let mut scale = 1.0f64;
    for (&x, &y) in a.iter().zip(b) {
        if !x.is_finite() || !y.is_finite() {
            return false;
        }
        diff = diff.max((x - y).norm());
        scale = scale.max(x.norm()).max(y.norm());
    }
    diff <= tol * scale
}

#[cfg(test)]
pub(crate) fn max_abs_diff<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Applies a linear map `m` (`new_ext × old_ext`, row-major) along every axis.
pub(crate) fn map_axes(data: &[f64], axes: usize, old_ext: usize, new_ext: usize, m: &[f64]) -> Vec<f64> {
    let mut cur = data.to_vec();
    for axis in 0..axes {
        let pre = new_ext.pow(axis as u32);
        let post = old_ext.pow((axes - axis - 1) as u32);
        let mut next = vec![0.0; pre * new_ext * post];
        for p in 0..pre {
            for y in 0..new_ext {
                let row = &m[y * old_ext..(y + 1) * old_ext];
                let dst = &mut next[(p * new_ext + y) * post..(p * new_ext + y + 1) * post];
                for (x, &c) in row.iter().enumerate() {
                    if c == 0.0 {
                        continue;
                    }
                    let src = &cur[(p * old_ext + x) * post..(p * old_ext + x + 1) * post];
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d += c * s;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}
