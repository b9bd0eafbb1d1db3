use rand::Rng;
use rand_chacha::ChaCha8Rng;

use trap_core::axioms::{check_axioms, check_morphism, HarnessConfig, Report};
use trap_core::graph::{random_graph, GraphTrap, RandomGraphOptions};
use trap_core::homv::{DenseTensor, HomV};
use trap_core::kernel::{random_band_limited, GridKernel, KernelTrap, TorusGrid};
use trap_core::num_complex::Complex64;
use trap_core::upgr::UTrap;
use trap_core::{Graph, Permutation, Result, Trap};

fn assert_all_pass(report: &Report) {
    for a in &report.axioms {
        assert!(
            a.passed(),
            "{} / {}: {} failures, first: {}",
            report.backend,
            a.axiom,
            a.failures.len(),
            serde_json::to_string(&a.failures[0]).unwrap()
        );
    }
}

fn label_graph(rng: &mut ChaCha8Rng, k: usize, l: usize, opts: &RandomGraphOptions) -> Graph<char> {
    random_graph(rng, k, l, opts, |rng, _, _| ['x', 'y', 'z'][rng.gen_range(0..3)])
}

#[test]
fn graphs_satisfy_the_axioms() {
    let cfg = HarnessConfig { trials: 200, seed: 11, max_arity: 4, max_legs: 8 };
    let opts = RandomGraphOptions::default();
    let report = check_axioms(&GraphTrap::<char>::unitary(), &|rng, k, l| label_graph(rng, k, l, &opts), &cfg);
    assert!(report.get("unit.t12(I*p)=p").is_some());
    assert_all_pass(&report);
}

#[test]
fn solar_graphs_satisfy_the_axioms() {
    let cfg = HarnessConfig { trials: 200, seed: 12, ..HarnessConfig::default() };
    let opts = RandomGraphOptions::solar();
    let report = check_axioms(&GraphTrap::<char>::solar(), &|rng, k, l| label_graph(rng, k, l, &opts), &cfg);
    assert!(report.get("unit.t12(I*p)=p").is_none());
    assert_all_pass(&report);
}

#[test]
fn homv_satisfies_the_axioms() {
    for dim in 1..=4 {
        let backend = HomV::<f64>::new(dim).with_tolerance(1e-12);
        let cfg = HarnessConfig { trials: 200, seed: dim as u64, max_arity: 3, max_legs: 8 };
        let report = check_axioms(&backend, &|rng, k, l| backend.random(rng, k, l), &cfg);
        assert_all_pass(&report);
    }
}

#[test]
fn complex_homv_satisfies_the_axioms() {
    let backend = HomV::<Complex64>::new(2);
    let cfg = HarnessConfig { trials: 100, seed: 5, max_arity: 3, max_legs: 7 };
    let report = check_axioms(&backend, &|rng, k, l| backend.random(rng, k, l), &cfg);
    assert_all_pass(&report);
}

#[test]
fn identity_is_a_morphism() {
    let backend = HomV::<f64>::new(3);
    let cfg = HarnessConfig { trials: 50, seed: 6, max_arity: 3, max_legs: 6 };
    let report = check_morphism(&backend, &backend, |p: &DenseTensor| Ok(p.clone()), &|rng, k, l| backend.random(rng, k, l), &cfg);
    assert_all_pass(&report);
}

/// Partial trace that removes the traced input by moving the last input into
/// its slot instead of shifting the later inputs down.
struct SwapRemoveTrace(HomV);

impl Trap for SwapRemoveTrace {
    type Elem = DenseTensor;

    fn name(&self) -> String {
        "broken".into()
    }

    fn arity(&self, p: &DenseTensor) -> (usize, usize) {
        p.arity()
    }

    fn act(&self, s: &Permutation, p: &DenseTensor, t: &Permutation) -> Result<DenseTensor> {
        self.0.act(s, p, t)
    }

    fn hconcat(&self, p: &DenseTensor, q: &DenseTensor) -> Result<DenseTensor> {
        self.0.hconcat(p, q)
    }

    fn partial_trace(&self, p: &DenseTensor, i: usize, j: usize) -> Result<DenseTensor> {
        let r = self.0.partial_trace(p, i, j)?;
        let k = p.k();
        if i + 1 >= k {
            return Ok(r);
        }
        let tau: Vec<usize> = (1..k)
            .map(|m| match m.cmp(&i) {
                std::cmp::Ordering::Less => m,
                std::cmp::Ordering::Equal => k - 1,
                std::cmp::Ordering::Greater => m - 1,
            })
            .collect();
        self.0.act(&Permutation::identity(r.l()), &r, &Permutation::from_images(&tau)?)
    }

    fn unit0(&self) -> DenseTensor {
        self.0.unit0()
    }

    fn eq(&self, p: &DenseTensor, q: &DenseTensor) -> bool {
        self.0.eq(p, q)
    }

    fn to_json(&self, p: &DenseTensor) -> serde_json::Value {
        self.0.to_json(p)
    }
}

#[test]
fn broken_trace_fails_commutativity_with_counterexample() {
    let backend = SwapRemoveTrace(HomV::new(2));
    let cfg = HarnessConfig { trials: 100, seed: 7, max_arity: 4, max_legs: 8 };
    let report = check_axioms(&backend, &|rng, k, l| backend.0.random(rng, k, l), &cfg);
    let failing: Vec<&str> = report.axioms.iter().filter(|a| !a.passed()).map(|a| a.axiom.as_str()).collect();
    assert!(failing.iter().any(|a| a.starts_with("3a.")), "{failing:?}");
    let first = &report.axioms.iter().find(|a| a.axiom.starts_with("3a.") && !a.passed()).unwrap().failures[0];
    assert!(!first.inputs.is_empty());
}

#[test]
fn kernels_satisfy_the_axioms() {
    for (n, td, legs) in [(5, 1, 6), (3, 2, 5)] {
        let grid = TorusGrid::new(n, td).unwrap();
        let backend = KernelTrap::new(grid);
        let cfg = HarnessConfig { trials: 100, seed: 8, max_arity: 4, max_legs: legs };
        let report = check_axioms(&backend, &|rng, k, l| random_band_limited(rng, k, l, grid, 2), &cfg);
        assert!(report.get("unit.t12(I*p)=p").is_none());
        assert_all_pass(&report);
    }
}

#[test]
fn grid_refinement_is_a_morphism() {
    let coarse = TorusGrid::new(6, 1).unwrap();
    let src = KernelTrap::new(coarse);
    let dst = KernelTrap::new(coarse.refined().unwrap());
    let cfg = HarnessConfig { trials: 60, seed: 9, max_arity: 3, max_legs: 5 };
    let report = check_morphism(&src, &dst, |p: &GridKernel| p.refine(), &|rng, k, l| random_band_limited(rng, k, l, coarse, 2), &cfg);
    assert_all_pass(&report);
}

#[test]
fn completion_of_kernels_is_unitary() {
    let grid = TorusGrid::new(4, 1).unwrap();
    let backend = UTrap::new(KernelTrap::new(grid));
    let cfg = HarnessConfig { trials: 100, seed: 10, max_arity: 4, max_legs: 8 };
    let gen = |rng: &mut ChaCha8Rng, k, l| backend.random_element(rng, k, l, |rng, a, b| random_band_limited(rng, a, b, grid, 1));
    let report = check_axioms(&backend, &gen, &cfg);
    assert!(report.get("unit.t12(I*p)=p").is_some());
    assert_all_pass(&report);
}

#[test]
fn embedding_into_the_completion_is_a_morphism() {
    let grid = TorusGrid::new(4, 1).unwrap();
    let base = KernelTrap::new(grid);
    let upgr = UTrap::new(base.clone());
    let cfg = HarnessConfig { trials: 100, seed: 13, max_arity: 4, max_legs: 6 };
    let report = check_morphism(&base, &upgr, |p: &GridKernel| Ok(upgr.embed(p)), &|rng, k, l| random_band_limited(rng, k, l, grid, 1), &cfg);
    assert_all_pass(&report);
}
