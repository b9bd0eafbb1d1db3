//! Linear maps `V^{⊗k} → V^{⊗l}` for a finite-dimensional `V`.

use std::marker::PhantomData;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{self, entry_count, Scalar};
use crate::error::{check_index, Result, TrapError};
use crate::perm::Permutation;
use crate::trapcore::Trap;

/// Coefficients of a map `V^{⊗k} → V^{⊗l}` with `dim V = dim`.
///
/// Axes are the `k` inputs followed by the `l` outputs, row-major. The entry
/// at `(a₁…a_k; b₁…b_l)` is the coefficient of `e_{b₁}⊗…⊗e_{b_l}` in the
/// image of `e_{a₁}⊗…⊗e_{a_k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTensor<S>", bound(deserialize = "S: Scalar"))]
pub struct DenseTensor<S = f64> {
    k: usize,
    l: usize,
    dim: usize,
    data: Vec<S>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTensor<S> {
    k: usize,
    l: usize,
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> TryFrom<RawTensor<S>> for DenseTensor<S> {
    type Error = TrapError;

    fn try_from(raw: RawTensor<S>) -> Result<Self> {
        DenseTensor::new(raw.k, raw.l, raw.dim, raw.data)
    }
}

impl<S: Scalar> DenseTensor<S> {
    pub fn new(k: usize, l: usize, dim: usize, data: Vec<S>) -> Result<Self> {
        if dim == 0 {
            return Err(TrapError::InvalidData("dim must be at least 1".into()));
        }
        let n = entry_count(dim, k + l)?;
        if data.len() != n {
            return Err(TrapError::InvalidData(format!(
                "expected {n} entries for ({k}, {l}) at dim {dim}, got {}",
                data.len()
            )));
        }
        if let Some(x) = data.iter().find(|x| !x.is_finite()) {
            return Err(TrapError::InvalidData(format!("non-finite entry {x:?}")));
        }
        Ok(Self { k, l, dim, data })
    }

    pub fn scalar(x: S, dim: usize) -> Self {
        Self {
            k: 0,
            l: 0,
            dim,
            data: vec![x],
        }
    }

    pub fn zeros(k: usize, l: usize, dim: usize) -> Result<Self> {
        Self::new(k, l, dim, vec![S::ZERO; entry_count(dim, k + l)?])
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, k: usize, l: usize, dim: usize) -> Self {
        let n = dim.pow((k + l) as u32);
        Self {
            k,
            l,
            dim,
            data: (0..n).map(|_| S::random(rng)).collect(),
        }
    }

    /// `θ(f₁…f_k ⊗ v₁…v_l)`: the map `x₁⊗…⊗x_k ↦ f₁(x₁)…f_k(x_k) v₁⊗…⊗v_l`.
    pub fn theta(functionals: &[Vec<S>], vectors: &[Vec<S>], dim: usize) -> Result<Self> {
        if let Some(bad) = functionals.iter().chain(vectors).find(|v| v.len() != dim) {
            return Err(TrapError::DimMismatch(bad.len(), dim));
        }
        let (k, l) = (functionals.len(), vectors.len());
        let mut data = vec![S::ONE];
        for factor in functionals.iter().chain(vectors) {
            data = data.iter().flat_map(|&x| factor.iter().map(move |&y| x * y)).collect();
        }
        Self::new(k, l, dim, data)
    }

    /// `Σ_i e_i ⊗ e_i^*`.
    pub fn identity(dim: usize) -> Self {
        let data = (0..dim * dim)
            .map(|r| if r / dim == r % dim { S::ONE } else { S::ZERO })
            .collect();
        Self { k: 1, l: 1, dim, data }
    }

    /// The `(1, 1)` tensor of the linear map with matrix `m` (`m[row][col]`,
    /// so that `y = m x`).
    pub fn from_linear_map(m: &[Vec<S>]) -> Result<Self> {
        let dim = m.len();
        if let Some(row) = m.iter().find(|r| r.len() != dim) {
            return Err(TrapError::DimMismatch(row.len(), dim));
        }
        let data = (0..dim * dim).map(|r| m[r % dim][r / dim]).collect();
        Self::new(1, 1, dim, data)
    }

    /// Inverse of [`DenseTensor::from_linear_map`].
    pub fn to_linear_map(&self) -> Option<Vec<Vec<S>>> {
        ((self.k, self.l) == (1, 1)).then(|| {
            let d = self.dim;
            (0..d).map(|b| (0..d).map(|a| self.data[a * d + b]).collect()).collect()
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.k, self.l)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    /// Entry at 0-based input indices `a` and output indices `b`.
    pub fn get(&self, a: &[usize], b: &[usize]) -> Option<S> {
        if a.len() != self.k || b.len() != self.l || a.iter().chain(b).any(|&x| x >= self.dim) {
            return None;
        }
        let r = a.iter().chain(b).fold(0, |acc, &x| acc * self.dim + x);
        Some(self.data[r])
    }

    /// The value of a `(0, 0)` tensor.
    pub fn as_scalar(&self) -> Option<S> {
        ((self.k, self.l) == (0, 0)).then(|| self.data[0])
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(TrapError::DimMismatch(self.dim, other.dim))
        }
    }

    pub fn act(&self, sigma: &Permutation, tau: &Permutation) -> Result<Self> {
        let data = dense::act(&self.data, self.k, self.l, self.dim, sigma, tau)?;
        Ok(Self { data, ..*self })
    }

    /// Outer product with axes (own inputs, other inputs, own outputs, other outputs).
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        self.contract(other, &[])
    }

    /// `trace_many(self * other, pairs)` with 1-based indices into the product.
    pub fn contract(&self, other: &Self, pairs: &[(usize, usize)]) -> Result<Self> {
        self.same_dim(other)?;
        let data = dense::contract(
            &self.data,
            self.arity(),
            &other.data,
            other.arity(),
            self.dim,
            pairs,
            1.0,
        )?;
        Ok(Self {
            k: self.k + other.k - pairs.len(),
            l: self.l + other.l - pairs.len(),
            dim: self.dim,
            data,
        })
    }

    pub fn partial_trace(&self, i: usize, j: usize) -> Result<Self> {
        check_index(i, self.k)?;
        check_index(j, self.l)?;
        self.contract(&Self::scalar(S::ONE, self.dim), &[(i, j)])
    }
}

impl<S: Scalar> std::ops::Mul<S> for &DenseTensor<S> {
    type Output = DenseTensor<S>;

    fn mul(self, c: S) -> DenseTensor<S> {
        DenseTensor {
            data: self.data.iter().map(|&x| x * c).collect(),
            ..*self
        }
    }
}

/// `Hom_V` with `dim V` fixed.
#[derive(Clone, Debug)]
pub struct HomV<S = f64> {
    dim: usize,
    tolerance: f64,
    _scalar: PhantomData<fn() -> S>,
}

impl<S> HomV<S> {
    pub const DEFAULT_TOLERANCE: f64 = 1e-10;

    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            tolerance: Self::DEFAULT_TOLERANCE,
            _scalar: PhantomData,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl<S: Scalar> HomV<S> {
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, k: usize, l: usize) -> DenseTensor<S> {
        DenseTensor::random(rng, k, l, self.dim)
    }

    fn check(&self, p: &DenseTensor<S>) -> Result<()> {
        if p.dim == self.dim {
            Ok(())
        } else {
            Err(TrapError::DimMismatch(p.dim, self.dim))
        }
    }
}

impl<S: Scalar> Trap for HomV<S> {
    type Elem = DenseTensor<S>;

    fn name(&self) -> String {
        format!("homv(dim={})", self.dim)
    }

    fn arity(&self, p: &DenseTensor<S>) -> (usize, usize) {
        p.arity()
    }

    fn act(&self, sigma: &Permutation, p: &DenseTensor<S>, tau: &Permutation) -> Result<DenseTensor<S>> {
        self.check(p)?;
        p.act(sigma, tau)
    }

    fn hconcat(&self, p: &DenseTensor<S>, q: &DenseTensor<S>) -> Result<DenseTensor<S>> {
        self.check(p)?;
        p.hconcat(q)
    }

    fn partial_trace(&self, p: &DenseTensor<S>, i: usize, j: usize) -> Result<DenseTensor<S>> {
        self.check(p)?;
        p.partial_trace(i, j)
    }

    fn unit0(&self) -> DenseTensor<S> {
        DenseTensor::scalar(S::ONE, self.dim)
    }

    fn unit1(&self) -> Option<DenseTensor<S>> {
        Some(DenseTensor::identity(self.dim))
    }

    fn eq(&self, p: &DenseTensor<S>, q: &DenseTensor<S>) -> bool {
        p.arity() == q.arity() && p.dim == q.dim && dense::close(&p.data, &q.data, self.tolerance)
    }

    fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn to_json(&self, p: &DenseTensor<S>) -> serde_json::Value {
        serde_json::to_value(p).unwrap_or(serde_json::Value::Null)
    }

    fn edge_extent(&self) -> usize {
        self.dim
    }

    fn trace_many(&self, p: &DenseTensor<S>, pairs: &[(usize, usize)]) -> Result<DenseTensor<S>> {
        self.check(p)?;
        p.contract(&self.unit0(), pairs)
    }

    fn contract(&self, p: &DenseTensor<S>, q: &DenseTensor<S>, pairs: &[(usize, usize)]) -> Result<DenseTensor<S>> {
        self.check(p)?;
        p.contract(q, pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trapcore::{gtrace, vconcat};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize, d: usize) -> Vec<f64> {
        (0..d).map(|x| if x == i { 1.0 } else { 0.0 }).collect()
    }

    #[test]
    fn theta_of_basis_vectors() {
        let t = DenseTensor::theta(&[e(0, 2)], &[e(1, 2)], 2).unwrap();
        assert_eq!(t.data(), &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(t.get(&[0], &[1]), Some(1.0));
        let s = DenseTensor::<f64>::theta(&[], &[], 3).unwrap();
        assert_eq!(s.as_scalar(), Some(1.0));
        assert!(DenseTensor::theta(&[e(0, 2)], &[e(1, 3)], 2).is_err());
    }

    #[test]
    fn theta_rank_one_coefficient() {
        let f = [vec![1.0, 2.0], vec![3.0, -1.0]];
        let v = [vec![0.5, 4.0]];
        let t = DenseTensor::theta(&f, &v, 2).unwrap();
        assert_eq!(t.arity(), (2, 1));
        assert_eq!(t.get(&[1, 0], &[1]), Some(2.0 * 3.0 * 4.0));
        assert_eq!(t.get(&[0, 1], &[0]), Some(-0.5));
    }

    #[test]
    fn identity_and_its_trace() {
        let id = DenseTensor::<f64>::identity(2);
        assert_eq!(id.data(), &[1.0, 0.0, 0.0, 1.0]);
        let b = HomV::<f64>::new(4);
        assert_eq!(gtrace(&b, &DenseTensor::identity(4)).unwrap().as_scalar(), Some(4.0));
    }

    #[test]
    fn partial_trace_of_matrix() {
        let t = DenseTensor::new(1, 1, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(t.partial_trace(1, 1).unwrap().as_scalar(), Some(5.0));
        assert!(t.partial_trace(2, 1).is_err());
    }

    #[test]
    fn act_on_theta_permutes_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = 3;
        let f: Vec<Vec<f64>> = (0..3).map(|_| (0..d).map(|_| rng.gen()).collect()).collect();
        let v: Vec<Vec<f64>> = (0..2).map(|_| (0..d).map(|_| rng.gen()).collect()).collect();
        let t = DenseTensor::theta(&f, &v, d).unwrap();
        let sigma = Permutation::from_images(&[2, 1]).unwrap();
        let tau = Permutation::from_images(&[2, 3, 1]).unwrap();
        let fp: Vec<Vec<f64>> = (1..=3).map(|m| f[tau.image(m) - 1].clone()).collect();
        let vp: Vec<Vec<f64>> = (1..=2).map(|m| v[sigma.preimage(m) - 1].clone()).collect();
        let want = DenseTensor::theta(&fp, &vp, d).unwrap();
        let got = t.act(&sigma, &tau).unwrap();
        assert!(dense::max_abs_diff(got.data(), want.data()) < 1e-15);
    }

    #[test]
    fn trace_of_theta_is_pairing() {
        let f = [vec![1.0, 2.0], vec![3.0, -1.0]];
        let v = [vec![0.5, 4.0], vec![2.0, 1.0]];
        let t = DenseTensor::theta(&f, &v, 2).unwrap();
        let got = t.partial_trace(2, 1).unwrap();
        let pairing = 3.0 * 0.5 + -4.0;
        let want = &DenseTensor::theta(&f[..1], &v[1..], 2).unwrap() * pairing;
        assert!(dense::max_abs_diff(got.data(), want.data()) < 1e-15);
    }

    #[test]
    fn identity_is_a_unit_for_tracing() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = DenseTensor::<f64>::random(&mut rng, 2, 1, 3);
        let got = DenseTensor::identity(3).hconcat(&t).unwrap().partial_trace(1, 2).unwrap();
        assert!(dense::max_abs_diff(got.data(), t.data()) < 1e-15);
    }

    #[test]
    fn hconcat_is_kronecker() {
        let a = DenseTensor::new(1, 1, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = DenseTensor::new(1, 1, 2, vec![0.0, 5.0, 6.0, 7.0]).unwrap();
        let ab = a.hconcat(&b).unwrap();
        assert_eq!(ab.arity(), (2, 2));
        // inputs (1,0), outputs (0,1): a[1;0]·b[0;1]
        assert_eq!(ab.get(&[1, 0], &[0, 1]), Some(3.0 * 5.0));
        let one = DenseTensor::scalar(1.0, 2);
        assert_eq!(one.hconcat(&a).unwrap(), a);
    }

    #[test]
    fn vconcat_is_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = HomV::<f64>::new(4);
        let x = b.random(&mut rng, 1, 1);
        let y = b.random(&mut rng, 1, 1);
        let got = vconcat(&b, &y, &x).unwrap().to_linear_map().unwrap();
        let (mx, my) = (x.to_linear_map().unwrap(), y.to_linear_map().unwrap());
        for r in 0..4 {
            for c in 0..4 {
                let want: f64 = (0..4).map(|m| my[r][m] * mx[m][c]).sum();
                assert!((got[r][c] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_map_round_trip() {
        let m = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let t = DenseTensor::from_linear_map(&m).unwrap();
        assert_eq!(t.get(&[1], &[0]), Some(2.0));
        assert_eq!(t.to_linear_map().unwrap(), m);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let t = DenseTensor::new(1, 1, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"k":1,"l":1,"dim":2,"data":[1.0,2.0,3.0,4.0]}"#);
        assert_eq!(serde_json::from_str::<DenseTensor>(&s).unwrap(), t);
        for bad in [
            r#"{"k":1,"l":1,"dim":2,"data":[1.0,2.0,3.0]}"#,
            r#"{"k":0,"l":0,"dim":0,"data":[1.0]}"#,
            r#"{"k":1,"l":1,"dim":2,"data":[1,2,3,4],"x":1}"#,
            r#"{"k":40,"l":40,"dim":9,"data":[]}"#,
        ] {
            assert!(serde_json::from_str::<DenseTensor>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn complex_scalars() {
        let b = HomV::<Complex64>::new(2);
        let i = Complex64::new(0.0, 1.0);
        let t = DenseTensor::new(1, 1, 2, vec![i, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), i]).unwrap();
        assert_eq!(gtrace(&b, &t).unwrap().as_scalar(), Some(Complex64::new(0.0, 2.0)));
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<DenseTensor<Complex64>>(&s).unwrap(), t);
    }

    #[test]
    fn dim_mismatch_is_an_error() {
        let b = HomV::<f64>::new(2);
        assert!(b.hconcat(&DenseTensor::identity(2), &DenseTensor::identity(3)).is_err());
        assert!(b.partial_trace(&DenseTensor::identity(3), 1, 1).is_err());
    }
}
