#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use trap_core::graph::{random_graph, RandomGraphOptions};
use trap_core::homv::DenseTensor;
use trap_core::kernel::{random_band_limited, GridKernel, TorusGrid};
use trap_core::Graph;

pub fn labels(rng: &mut ChaCha8Rng, k: usize, l: usize, opts: &RandomGraphOptions) -> Graph<char> {
    random_graph(rng, k, l, opts, |rng, _, _| ['x', 'y', 'z'][rng.gen_range(0..3)])
}

pub fn tensor_graph(rng: &mut ChaCha8Rng, k: usize, l: usize, dim: usize, opts: &RandomGraphOptions) -> Graph<DenseTensor> {
    random_graph(rng, k, l, opts, |rng, a, b| DenseTensor::random(rng, a, b, dim))
}

pub fn kernel_graph(rng: &mut ChaCha8Rng, k: usize, l: usize, grid: TorusGrid, opts: &RandomGraphOptions) -> Graph<GridKernel> {
    random_graph(rng, k, l, opts, |rng, a, b| random_band_limited(rng, a, b, grid, 2))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `max|a-b| / max(1, max|a|, max|b|)`.
pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(1.0f64, |m, x| m.max(x.abs()));
    max_diff(a, b) / scale
}

/// Modified Bessel function `I_0` by its power series.
pub fn bessel_i0(x: f64) -> f64 {
    let (mut term, mut sum) = (1.0, 1.0);
    for m in 1..200 {
        term *= (x / 2.0) * (x / 2.0) / (m * m) as f64;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}
