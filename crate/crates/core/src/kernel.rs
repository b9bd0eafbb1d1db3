//! Smooth kernels on flat tori, sampled on a uniform grid.
//!
//! A kernel `K(x₁…x_k; y₁…y_l)` on `(S¹)^d` is stored by its values at grid
//! points; the trace `∫ dμ(z)` is the periodic trapezoid rule, which is exact
//! on trigonometric polynomials of degree below the number of points.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{self, entry_count};
use crate::error::{check_index, Result, TrapError};
use crate::perm::Permutation;
use crate::trapcore::{self, Trap};

const MAX_POINTS: usize = 1 << 12;

/// Uniform grid `x_r = 2πr/N` on each circle of `(S¹)^torus_dim`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct TorusGrid {
    n_points: usize,
    torus_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n_points: usize,
    torus_dim: usize,
    #[serde(default)]
    weight: Option<f64>,
}

impl TryFrom<RawGrid> for TorusGrid {
    type Error = TrapError;

    fn try_from(raw: RawGrid) -> Result<Self> {
        let g = TorusGrid::new(raw.n_points, raw.torus_dim)?;
        match raw.weight {
            Some(w) => g.with_weight(w),
            None => Ok(g),
        }
    }
}

impl TorusGrid {
    pub fn new(n_points: usize, torus_dim: usize) -> Result<Self> {
        if !(3..=MAX_POINTS).contains(&n_points) {
            return Err(TrapError::InvalidData(format!("n_points must be in 3..={MAX_POINTS}, got {n_points}")));
        }
        if !(1..=2).contains(&torus_dim) {
            return Err(TrapError::InvalidData(format!("torus_dim must be 1 or 2, got {torus_dim}")));
        }
        Ok(Self {
            n_points,
            torus_dim,
            weight: None,
        })
    }

    /// Replaces the Lebesgue weight `(2π/N)^d` by another constant density.
    pub fn with_weight(mut self, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(TrapError::InvalidData(format!("weight must be positive, got {weight}")));
        }
        self.weight = Some(weight);
        Ok(self)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn torus_dim(&self) -> usize {
        self.torus_dim
    }

    /// Quadrature weight of one grid point.
    pub fn weight(&self) -> f64 {
        self.weight
            .unwrap_or_else(|| (2.0 * PI / self.n_points as f64).powi(self.torus_dim as i32))
    }

    /// Number of grid points of the torus, the extent of one kernel axis.
    pub fn extent(&self) -> usize {
        self.n_points.pow(self.torus_dim as u32)
    }

    /// Coordinates of the `r`-th grid point.
    pub fn point(&self, r: usize) -> Vec<f64> {
        let h = 2.0 * PI / self.n_points as f64;
        let mut out = vec![0.0; self.torus_dim];
        let mut r = r;
        for c in out.iter_mut().rev() {
            *c = (r % self.n_points) as f64 * h;
            r /= self.n_points;
        }
        out
    }

    /// The grid with twice as many points per circle.
    pub fn refined(&self) -> Result<Self> {
        let g = Self::new(2 * self.n_points, self.torus_dim)?;
        Ok(match self.weight {
            Some(w) => g.with_weight(w / 2f64.powi(self.torus_dim as i32))?,
            None => g,
        })
    }
}

/// A sampled kernel with `k` input variables and `l` output variables.
///
/// `samples` has `k + l` axes of extent `grid.extent()`, inputs first,
/// row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKernel")]
pub struct GridKernel {
    grid: TorusGrid,
    k: usize,
    l: usize,
    samples: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    grid: TorusGrid,
    k: usize,
    l: usize,
    samples: Vec<f64>,
}

impl TryFrom<RawKernel> for GridKernel {
    type Error = TrapError;

    fn try_from(raw: RawKernel) -> Result<Self> {
        GridKernel::new(raw.grid, raw.k, raw.l, raw.samples)
    }
}

impl GridKernel {
    pub fn new(grid: TorusGrid, k: usize, l: usize, samples: Vec<f64>) -> Result<Self> {
        let n = entry_count(grid.extent(), k + l)?;
        if samples.len() != n {
            return Err(TrapError::InvalidData(format!(
                "expected {n} samples for ({k}, {l}) on {} points, got {}",
                grid.extent(),
                samples.len()
            )));
        }
        if let Some(x) = samples.iter().find(|x| !x.is_finite()) {
            return Err(TrapError::InvalidData(format!("non-finite sample {x}")));
        }
        Ok(Self { grid, k, l, samples })
    }

    /// Evaluates `f` at every grid tuple. `f` receives the coordinates of
    /// `x₁…x_k, y₁…y_l` concatenated, `torus_dim` numbers per variable.
    pub fn sample(f: impl Fn(&[f64]) -> f64, k: usize, l: usize, grid: TorusGrid) -> Result<Self> {
        let ext = grid.extent();
        let n = entry_count(ext, k + l)?;
        let points: Vec<Vec<f64>> = if k + l == 0 { Vec::new() } else { (0..ext).map(|r| grid.point(r)).collect() };
        let td = grid.torus_dim;
        let mut coords = vec![0.0; (k + l) * td];
        let samples = (0..n)
            .map(|mut r| {
                for v in (0..k + l).rev() {
                    coords[v * td..(v + 1) * td].copy_from_slice(&points[r % ext]);
                    r /= ext;
                }
                f(&coords)
            })
            .collect();
        Self::new(grid, k, l, samples)
    }

    pub fn scalar(x: f64, grid: TorusGrid) -> Self {
        Self {
            grid,
            k: 0,
            l: 0,
            samples: vec![x],
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.k, self.l)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Sample at grid-point indices `x` (inputs) and `y` (outputs).
    pub fn get(&self, x: &[usize], y: &[usize]) -> Option<f64> {
        let ext = self.grid.extent();
        if x.len() != self.k || y.len() != self.l || x.iter().chain(y).any(|&r| r >= ext) {
            return None;
        }
        Some(self.samples[x.iter().chain(y).fold(0, |acc, &r| acc * ext + r)])
    }

    pub fn as_scalar(&self) -> Option<f64> {
        ((self.k, self.l) == (0, 0)).then(|| self.samples[0])
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(TrapError::GridMismatch)
        }
    }

    pub fn act(&self, sigma: &Permutation, tau: &Permutation) -> Result<Self> {
        let samples = dense::act(&self.samples, self.k, self.l, self.grid.extent(), sigma, tau)?;
        Ok(Self {
            samples,
            grid: self.grid,
            ..*self
        })
    }

    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        self.contract(other, &[])
    }

    /// Partial convolutions of `self * other` along `pairs` (1-based).
    pub fn contract(&self, other: &Self, pairs: &[(usize, usize)]) -> Result<Self> {
        self.same_grid(other)?;
        let samples = dense::contract(
            &self.samples,
            self.arity(),
            &other.samples,
            other.arity(),
            self.grid.extent(),
            pairs,
            self.grid.weight(),
        )?;
        Ok(Self {
            grid: self.grid,
            k: self.k + other.k - pairs.len(),
            l: self.l + other.l - pairs.len(),
            samples,
        })
    }

    /// `∫ K(…x_{i−1}, z, x_i…; …y_{j−1}, z, y_j…) dμ(z)`.
    pub fn partial_trace(&self, i: usize, j: usize) -> Result<Self> {
        check_index(i, self.k)?;
        check_index(j, self.l)?;
        self.contract(&Self::scalar(1.0, self.grid), &[(i, j)])
    }

    /// Trigonometric interpolation onto the grid with twice as many points.
    ///
    /// Exact for kernels whose frequencies in every variable stay below
    /// `N/2`.
    pub fn refine(&self) -> Result<Self> {
        let fine = self.grid.refined()?;
        let m = interpolation_matrix(self.grid.n_points, fine.n_points);
        let m = if self.grid.torus_dim == 2 { kron(&m, &m, self.grid.n_points) } else { m };
        let samples = dense::map_axes(&self.samples, self.k + self.l, self.grid.extent(), fine.extent(), &m);
        Self::new(fine, self.k, self.l, samples)
    }
}

/// `M[y][r]`: value at fine point `y` of the trigonometric interpolant of the
/// coarse cardinal function at `x_r`.
fn interpolation_matrix(n: usize, m: usize) -> Vec<f64> {
    let half = (n - 1) / 2;
    let mut out = vec![0.0; m * n];
    for y in 0..m {
        let py = 2.0 * PI * y as f64 / m as f64;
        for r in 0..n {
            let d = py - 2.0 * PI * r as f64 / n as f64;
            let mut s = 1.0 + 2.0 * (1..=half).map(|f| (f as f64 * d).cos()).sum::<f64>();
            if n.is_multiple_of(2) {
                s += (n as f64 / 2.0 * d).cos();
            }
            out[y * n + r] = s / n as f64;
        }
    }
    out
}

/// `a ⊗ a` for a `rows × cols` matrix, on row-major pairs of indices.
fn kron(a: &[f64], b: &[f64], cols: usize) -> Vec<f64> {
    let rows = a.len() / cols;
    let mut out = vec![0.0; rows * rows * cols * cols];
    for y1 in 0..rows {
        for y2 in 0..rows {
            for r1 in 0..cols {
                for r2 in 0..cols {
                    out[(y1 * rows + y2) * cols * cols + r1 * cols + r2] = a[y1 * cols + r1] * b[y2 * cols + r2];
                }
            }
        }
    }
    out
}

/// Closed-form kernels available by name.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedKernel {
    /// The constant 1, any arity.
    One,
    /// `cos(x − y)` per coordinate, arity `(1, 1)`.
    CosCos,
    /// Periodic heat kernel at time `t`, frequencies `|f| ≤ N/2`, arity `(1, 1)`.
    GaussHeat(f64),
}

impl NamedKernel {
    pub fn sample(&self, k: usize, l: usize, grid: TorusGrid) -> Result<GridKernel> {
        let td = grid.torus_dim;
        let need_11 = |name: &str| {
            if (k, l) == (1, 1) {
                Ok(())
            } else {
                Err(TrapError::ArityMismatch(format!("{name} has arity (1, 1), not ({k}, {l})")))
            }
        };
        match *self {
            NamedKernel::One => GridKernel::sample(|_| 1.0, k, l, grid),
            NamedKernel::CosCos => {
                need_11("coscos")?;
                GridKernel::sample(|c| (0..td).map(|a| (c[a] - c[td + a]).cos()).product(), 1, 1, grid)
            }
            NamedKernel::GaussHeat(t) => {
                need_11("gauss_heat")?;
                let fmax = grid.n_points as i64 / 2;
                let h = |d: f64| (-fmax..=fmax).map(|f| (-(f * f) as f64 * t).exp() * (f as f64 * d).cos()).sum::<f64>() / (2.0 * PI);
                GridKernel::sample(|c| (0..td).map(|a| h(c[a] - c[td + a])).product(), 1, 1, grid)
            }
        }
    }
}

impl fmt::Display for NamedKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedKernel::One => write!(f, "one"),
            NamedKernel::CosCos => write!(f, "coscos"),
            NamedKernel::GaussHeat(t) => write!(f, "gauss_heat({t})"),
        }
    }
}

impl FromStr for NamedKernel {
    type Err = TrapError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "one" => return Ok(NamedKernel::One),
            "coscos" => return Ok(NamedKernel::CosCos),
            _ => {}
        }
        let t = s
            .strip_prefix("gauss_heat(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| TrapError::InvalidData(format!("unknown kernel `{s}`")))?;
        let t: f64 = t
            .trim()
            .parse()
            .map_err(|_| TrapError::InvalidData(format!("bad heat time `{t}`")))?;
        if !(t.is_finite() && t >= 0.0) {
            return Err(TrapError::InvalidData(format!("heat time must be non-negative, got {t}")));
        }
        Ok(NamedKernel::GaussHeat(t))
    }
}

/// Random trigonometric polynomial with frequencies up to `max_freq` in
/// every coordinate: a sum of three products of shifted cosines.
pub fn random_band_limited<R: Rng + ?Sized>(rng: &mut R, k: usize, l: usize, grid: TorusGrid, max_freq: usize) -> GridKernel {
    let td = grid.torus_dim;
    let ext = grid.extent();
    let points: Vec<Vec<f64>> = if k + l == 0 { Vec::new() } else { (0..ext).map(|r| grid.point(r)).collect() };
    // per term and variable, the factor's values at every grid point
    let terms: Vec<(f64, Vec<Vec<f64>>)> = (0..3)
        .map(|_| {
            let amp = rng.gen_range(-1.0..=1.0);
            let tables = (0..k + l)
                .map(|_| {
                    let waves: Vec<(f64, f64)> = (0..td)
                        .map(|_| (rng.gen_range(0..=max_freq) as f64, rng.gen_range(0.0..2.0 * PI)))
                        .collect();
                    points
                        .iter()
                        .map(|x| waves.iter().zip(x).map(|(&(f, ph), &c)| (f * c + ph).cos()).product())
                        .collect()
                })
                .collect();
            (amp, tables)
        })
        .collect();
    let n = ext.pow((k + l) as u32);
    let mut idx = vec![0; k + l];
    let samples = (0..n)
        .map(|mut r| {
            for v in (0..k + l).rev() {
                idx[v] = r % ext;
                r /= ext;
            }
            terms
                .iter()
                .map(|(a, t)| a * t.iter().zip(&idx).map(|(col, &i)| col[i]).product::<f64>())
                .sum()
        })
        .collect();
    GridKernel::new(grid, k, l, samples).expect("finite samples of the right length")
}

/// Kernels on one grid as a TRAP. There is no unit: the identity would be a
/// delta distribution.
#[derive(Clone, Debug)]
pub struct KernelTrap {
    grid: TorusGrid,
    tolerance: f64,
}

impl KernelTrap {
    pub const DEFAULT_TOLERANCE: f64 = 1e-10;

    pub fn new(grid: TorusGrid) -> Self {
        Self {
            grid,
            tolerance: Self::DEFAULT_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    fn check(&self, p: &GridKernel) -> Result<()> {
        if p.grid == self.grid {
            Ok(())
        } else {
            Err(TrapError::GridMismatch)
        }
    }
}

impl Trap for KernelTrap {
    type Elem = GridKernel;

    fn name(&self) -> String {
        format!("kernel(n_points={}, torus_dim={})", self.grid.n_points, self.grid.torus_dim)
    }

    fn arity(&self, p: &GridKernel) -> (usize, usize) {
        p.arity()
    }

    fn act(&self, sigma: &Permutation, p: &GridKernel, tau: &Permutation) -> Result<GridKernel> {
        self.check(p)?;
        p.act(sigma, tau)
    }

    fn hconcat(&self, p: &GridKernel, q: &GridKernel) -> Result<GridKernel> {
        self.check(p)?;
        p.hconcat(q)
    }

    fn partial_trace(&self, p: &GridKernel, i: usize, j: usize) -> Result<GridKernel> {
        self.check(p)?;
        p.partial_trace(i, j)
    }

    fn unit0(&self) -> GridKernel {
        GridKernel::scalar(1.0, self.grid)
    }

    fn eq(&self, p: &GridKernel, q: &GridKernel) -> bool {
        p.arity() == q.arity() && p.grid == q.grid && dense::close(&p.samples, &q.samples, self.tolerance)
    }

    fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn to_json(&self, p: &GridKernel) -> serde_json::Value {
        serde_json::to_value(p).unwrap_or(serde_json::Value::Null)
    }

    fn edge_extent(&self) -> usize {
        self.grid.extent()
    }

    fn trace_many(&self, p: &GridKernel, pairs: &[(usize, usize)]) -> Result<GridKernel> {
        self.check(p)?;
        p.contract(&self.unit0(), pairs)
    }

    fn contract(&self, p: &GridKernel, q: &GridKernel, pairs: &[(usize, usize)]) -> Result<GridKernel> {
        self.check(p)?;
        p.contract(q, pairs)
    }
}

/// Generalised convolution `∫ K₁(x⃗, y⃗) K₂(y⃗, z⃗) dμ(y⃗)`.
pub fn vconcat(k2: &GridKernel, k1: &GridKernel) -> Result<GridKernel> {
    k1.same_grid(k2)?;
    trapcore::vconcat(&KernelTrap::new(k1.grid), k2, k1)
}

/// Integral of `K(x⃗, x⃗)` along the small diagonal.
pub fn gtrace(g: &GridKernel) -> Result<f64> {
    let r = trapcore::gtrace(&KernelTrap::new(g.grid), g)?;
    Ok(r.samples[0])
}
