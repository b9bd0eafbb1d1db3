//! Randomized checking of the TRAP axioms and of TRAP morphisms.
//!
//! Every trial draws its inputs from its own seeded ChaCha stream, so a
//! failure is reproduced by re-running that single seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::Result;
use crate::perm::Permutation;
use crate::trapcore::Trap;

/// Random element of a prescribed arity `(k, l)`.
pub type Generator<'a, E> = dyn Fn(&mut ChaCha8Rng, usize, usize) -> E + Sync + 'a;

#[derive(Clone, Copy, Debug)]
pub struct HarnessConfig {
    pub trials: usize,
    pub seed: u64,
    /// Arities are drawn from `0..=max_arity`.
    pub max_arity: usize,
    /// Upper bound on the legs `k + l` of any element built during a trial.
    pub max_legs: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            seed: 0,
            max_arity: 4,
            max_legs: 8,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub seed: u64,
    pub inputs: Vec<Value>,
    pub lhs: Value,
    pub rhs: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub trials: usize,
    pub failures: Vec<Failure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub backend: String,
    pub axioms: Vec<AxiomReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.axioms.iter().all(AxiomReport::passed)
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomReport> {
        self.axioms.iter().find(|a| a.axiom == axiom)
    }

    pub fn total_trials(&self) -> usize {
        self.axioms.iter().map(|a| a.trials).sum()
    }
}

/// One trial's verdict: `None` when the trial does not apply to the drawn
/// arities, otherwise the inputs and both sides.
struct Outcome<E> {
    inputs: Vec<E>,
    lhs: Result<E>,
    rhs: Result<E>,
}

type Check<'a, B> = Box<
    dyn Fn(&B, &Generator<'_, <B as Trap>::Elem>, &mut ChaCha8Rng, &HarnessConfig) -> Option<Outcome<<B as Trap>::Elem>>
        + Sync
        + 'a,
>;

fn trial_seed(base: u64, axiom: usize, trial: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((axiom as u64) << 40) ^ trial as u64
}

fn draw_arities(rng: &mut ChaCha8Rng, cfg: &HarnessConfig, mins: &[usize]) -> Vec<(usize, usize)> {
    let budget = cfg.max_legs.max(2 * mins.iter().sum::<usize>());
    loop {
        let v: Vec<(usize, usize)> = mins
            .iter()
            .map(|&m| {
                let hi = cfg.max_arity.max(m);
                (rng.gen_range(m..=hi), rng.gen_range(m..=hi))
            })
            .collect();
        if v.iter().map(|(k, l)| k + l).sum::<usize>() <= budget {
            return v;
        }
    }
}

fn perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    Permutation::random(n, rng)
}

fn json_err<B: Trap>(b: &B, r: &Result<B::Elem>) -> Value {
    match r {
        Ok(e) => b.to_json(e),
        Err(err) => Value::String(format!("error: {err}")),
    }
}

fn run_checks<B: Trap>(
    backend: &B,
    gen: &Generator<'_, B::Elem>,
    cfg: &HarnessConfig,
    checks: Vec<(String, Check<'_, B>)>,
) -> Report {
    let axioms = checks
        .iter()
        .enumerate()
        .map(|(ai, (name, check))| {
            let results: Vec<Option<Failure>> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = trial_seed(cfg.seed, ai, t);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let outcome = check(backend, gen, &mut rng, cfg)?;
                    let ok = match (&outcome.lhs, &outcome.rhs) {
                        (Ok(a), Ok(b)) => backend.eq(a, b),
                        _ => false,
                    };
                    (!ok).then(|| Failure {
                        seed,
                        inputs: outcome.inputs.iter().map(|e| backend.to_json(e)).collect(),
                        lhs: json_err(backend, &outcome.lhs),
                        rhs: json_err(backend, &outcome.rhs),
                    })
                })
                .collect();
            AxiomReport {
                axiom: name.clone(),
                trials: cfg.trials,
                failures: results.into_iter().flatten().collect(),
            }
        })
        .collect();
    Report {
        backend: backend.name(),
        axioms,
    }
}

macro_rules! check {
    ($body:expr) => {
        Box::new($body) as Check<'_, B>
    };
}

/// Runs the TRAP axioms, the unitarity relations when the backend has a unit,
/// and the reduced criteria `t_{1,1}(p*p′) = t_{1,1}(p)*p′` and
/// `t_{1,2}(I*p) = p`.
pub fn check_axioms<B: Trap>(backend: &B, gen: &Generator<'_, B::Elem>, cfg: &HarnessConfig) -> Report {
    let mut checks: Vec<(String, Check<'_, B>)> = vec![
        (
            "1.identity".into(),
            check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let (k, l) = draw_arities(rng, cfg, &[0])[0];
                let p = g(rng, k, l);
                let lhs = b.act(&Permutation::identity(l), &p, &Permutation::identity(k));
                Some(Outcome { inputs: vec![p.clone()], lhs, rhs: Ok(p) })
            }),
        ),
        (
            "1.composition".into(),
            check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let (k, l) = draw_arities(rng, cfg, &[0])[0];
                let p = g(rng, k, l);
                let (s1, s2, t1, t2) = (perm(rng, l), perm(rng, l), perm(rng, k), perm(rng, k));
                let lhs = b.act(&s2, &p, &t2).and_then(|x| b.act(&s1, &x, &t1));
                let rhs = b.act(&s1.compose(&s2).unwrap(), &p, &t2.compose(&t1).unwrap());
                Some(Outcome { inputs: vec![p], lhs, rhs })
            }),
        ),
        (
            "2a.associativity".into(),
            check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let a = draw_arities(rng, cfg, &[0, 0, 0]);
                let (p, q, r) = (g(rng, a[0].0, a[0].1), g(rng, a[1].0, a[1].1), g(rng, a[2].0, a[2].1));
                let lhs = b.hconcat(&p, &q).and_then(|x| b.hconcat(&x, &r));
                let rhs = b.hconcat(&q, &r).and_then(|x| b.hconcat(&p, &x));
                Some(Outcome { inputs: vec![p, q, r], lhs, rhs })
            }),
        ),
        (
            "2b.left-unit".into(),
            check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let (k, l) = draw_arities(rng, cfg, &[0])[0];
                let p = g(rng, k, l);
                let lhs = b.hconcat(&b.unit0(), &p);
                Some(Outcome { inputs: vec![p.clone()], lhs, rhs: Ok(p) })
            }),
        ),
        (
            "2b.right-unit".into(),
            check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let (k, l) = draw_arities(rng, cfg, &[0])[0];
                let p = g(rng, k, l);
                let lhs = b.hconcat(&p, &b.unit0());
                Some(Outcome { inputs: vec![p.clone()], lhs, rhs: Ok(p) })
            }),
        ),
        (
            "2c.compatibility".into(),
            check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let a = draw_arities(rng, cfg, &[0, 0]);
                let (p, q) = (g(rng, a[0].0, a[0].1), g(rng, a[1].0, a[1].1));
                let (s, t) = (perm(rng, a[0].1), perm(rng, a[0].0));
                let (s2, t2) = (perm(rng, a[1].1), perm(rng, a[1].0));
                let lhs = b
                    .act(&s, &p, &t)
                    .and_then(|x| Ok((x, b.act(&s2, &q, &t2)?)))
                    .and_then(|(x, y)| b.hconcat(&x, &y));
                let rhs = b
                    .hconcat(&p, &q)
                    .and_then(|x| b.act(&s.tensor_sum(&s2), &x, &t.tensor_sum(&t2)));
                Some(Outcome { inputs: vec![p, q], lhs, rhs })
            }),
        ),
        (
            "2d.commutativity".into(),
            check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let a = draw_arities(rng, cfg, &[0, 0]);
                let ((k, l), (k2, l2)) = (a[0], a[1]);
                let (p, q) = (g(rng, k, l), g(rng, k2, l2));
                let lhs = b
                    .hconcat(&p, &q)
                    .and_then(|x| b.act(&Permutation::block_shuffle(l, l2), &x, &Permutation::identity(k + k2)));
                let rhs = b
                    .hconcat(&q, &p)
                    .and_then(|x| b.act(&Permutation::identity(l + l2), &x, &Permutation::block_shuffle(k, k2)));
                Some(Outcome { inputs: vec![p, q], lhs, rhs })
            }),
        ),
    ];

    for (name, in_lt, out_lt) in [
        ("3a.commutativity(i<i',j<j')", true, true),
        ("3a.commutativity(i<i',j>j')", true, false),
        ("3a.commutativity(i>i',j<j')", false, true),
        ("3a.commutativity(i>i',j>j')", false, false),
    ] {
        checks.push((
            name.into(),
            check!(move |b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let (k, l) = draw_arities(rng, cfg, &[2])[0];
                let p = g(rng, k, l);
                let (mut i, mut i2) = distinct_pair(rng, k);
                let (mut j, mut j2) = distinct_pair(rng, l);
                if (i < i2) != in_lt {
                    std::mem::swap(&mut i, &mut i2);
                }
                if (j < j2) != out_lt {
                    std::mem::swap(&mut j, &mut j2);
                }
                let after = |x: usize, gone: usize| if x > gone { x - 1 } else { x };
                let lhs = b
                    .partial_trace(&p, i, j)
                    .and_then(|x| b.partial_trace(&x, after(i2, i), after(j2, j)));
                let rhs = b
                    .partial_trace(&p, i2, j2)
                    .and_then(|x| b.partial_trace(&x, after(i, i2), after(j, j2)));
                Some(Outcome { inputs: vec![p], lhs, rhs })
            }),
        ));
    }

    checks.push((
        "3b.equivariance".into(),
        check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
            let (k, l) = draw_arities(rng, cfg, &[1])[0];
            let p = g(rng, k, l);
            let (s, t) = (perm(rng, l), perm(rng, k));
            let (i, j) = (rng.gen_range(1..=k), rng.gen_range(1..=l));
            let lhs = b.act(&s, &p, &t).and_then(|x| b.partial_trace(&x, i, j));
            let sj = s.delete_index(j).unwrap();
            let ti = t.delete_position(i).unwrap();
            let rhs = b
                .partial_trace(&p, t.image(i), s.preimage(j))
                .and_then(|x| b.act(&sj, &x, &ti));
            Some(Outcome { inputs: vec![p], lhs, rhs })
        }),
    ));
    checks.push((
        "3c.left".into(),
        check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
            let a = draw_arities(rng, cfg, &[1, 0]);
            let ((k, l), (k2, l2)) = (a[0], a[1]);
            let (p, q) = (g(rng, k, l), g(rng, k2, l2));
            let (i, j) = (rng.gen_range(1..=k), rng.gen_range(1..=l));
            let lhs = b.hconcat(&p, &q).and_then(|x| b.partial_trace(&x, i, j));
            let rhs = b.partial_trace(&p, i, j).and_then(|x| b.hconcat(&x, &q));
            Some(Outcome { inputs: vec![p, q], lhs, rhs })
        }),
    ));
    checks.push((
        "3c.right".into(),
        check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
            let a = draw_arities(rng, cfg, &[0, 1]);
            let ((k, l), (k2, l2)) = (a[0], a[1]);
            let (p, q) = (g(rng, k, l), g(rng, k2, l2));
            let (i, j) = (rng.gen_range(1..=k2), rng.gen_range(1..=l2));
            let lhs = b.hconcat(&p, &q).and_then(|x| b.partial_trace(&x, k + i, l + j));
            let rhs = b.partial_trace(&q, i, j).and_then(|x| b.hconcat(&p, &x));
            Some(Outcome { inputs: vec![p, q], lhs, rhs })
        }),
    ));
    checks.push((
        "3c.reduced(t11)".into(),
        check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
            let a = draw_arities(rng, cfg, &[1, 0]);
            let ((k, l), (k2, l2)) = (a[0], a[1]);
            let (p, q) = (g(rng, k, l), g(rng, k2, l2));
            let lhs = b.hconcat(&p, &q).and_then(|x| b.partial_trace(&x, 1, 1));
            let rhs = b.partial_trace(&p, 1, 1).and_then(|x| b.hconcat(&x, &q));
            Some(Outcome { inputs: vec![p, q], lhs, rhs })
        }),
    ));

    if backend.unit1().is_some() {
        checks.extend(unit_checks::<B>());
    }
    run_checks(backend, gen, cfg, checks)
}

fn distinct_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let a = rng.gen_range(1..=n);
    let mut b = rng.gen_range(1..n);
    if b >= a {
        b += 1;
    }
    (a, b)
}

fn unit_checks<'a, B: Trap + 'a>() -> Vec<(String, Check<'a, B>)> {
    vec![
        (
            "unit.t12(I*p)=p".into(),
            check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let (k, l) = draw_arities(rng, cfg, &[0])[0];
                let l = l.max(1);
                let p = g(rng, k, l);
                let i = b.unit1().unwrap();
                let lhs = b.hconcat(&i, &p).and_then(|x| b.partial_trace(&x, 1, 2));
                Some(Outcome { inputs: vec![p.clone()], lhs, rhs: Ok(p) })
            }),
        ),
        (
            "unit.t1j(I*p)".into(),
            check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let (k, l) = draw_arities(rng, cfg, &[0])[0];
                let l = l.max(1);
                let p = g(rng, k, l);
                let j = rng.gen_range(2..=l + 1);
                let i = b.unit1().unwrap();
                let lhs = b.hconcat(&i, &p).and_then(|x| b.partial_trace(&x, 1, j));
                let rhs = b.act(&Permutation::cycle(l, 1, j - 1), &p, &Permutation::identity(k));
                Some(Outcome { inputs: vec![p], lhs, rhs })
            }),
        ),
        (
            "unit.ti1(I*p)".into(),
            check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let (k, l) = draw_arities(rng, cfg, &[0])[0];
                let k = k.max(1);
                let p = g(rng, k, l);
                let i = rng.gen_range(2..=k + 1);
                let u = b.unit1().unwrap();
                let lhs = b.hconcat(&u, &p).and_then(|x| b.partial_trace(&x, i, 1));
                let rhs = b.act(&Permutation::identity(l), &p, &Permutation::cycle(k, 1, i - 1).inverse());
                Some(Outcome { inputs: vec![p], lhs, rhs })
            }),
        ),
        (
            "unit.t(k+1)j(p*I)".into(),
            check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let (k, l) = draw_arities(rng, cfg, &[0])[0];
                let l = l.max(1);
                let p = g(rng, k, l);
                let j = rng.gen_range(1..=l);
                let u = b.unit1().unwrap();
                let lhs = b.hconcat(&p, &u).and_then(|x| b.partial_trace(&x, k + 1, j));
                let rhs = b.act(&Permutation::cycle(l, j, l).inverse(), &p, &Permutation::identity(k));
                Some(Outcome { inputs: vec![p], lhs, rhs })
            }),
        ),
        (
            "unit.ti(l+1)(p*I)".into(),
            check!(|b: &B, g: &Generator<'_, B::Elem>, rng: &mut ChaCha8Rng, cfg: &HarnessConfig| {
                let (k, l) = draw_arities(rng, cfg, &[0])[0];
                let k = k.max(1);
                let p = g(rng, k, l);
                let i = rng.gen_range(1..=k);
                let u = b.unit1().unwrap();
                let lhs = b.hconcat(&p, &u).and_then(|x| b.partial_trace(&x, i, l + 1));
                let rhs = b.act(&Permutation::identity(l), &p, &Permutation::cycle(k, i, k));
                Some(Outcome { inputs: vec![p], lhs, rhs })
            }),
        ),
    ]
}

/// Checks that `phi` is a TRAP morphism from `src` to `dst`: equivariance,
/// `I_0`, horizontal concatenation, `t_{1,1}`, arbitrary `t_{i,j}`, and `I`
/// when both sides are unitary.
pub fn check_morphism<A, B, F>(
    src: &A,
    dst: &B,
    phi: F,
    gen: &Generator<'_, A::Elem>,
    cfg: &HarnessConfig,
) -> Report
where
    A: Trap,
    B: Trap,
    F: Fn(&A::Elem) -> Result<B::Elem> + Sync,
{
    type MCheck<'a, A, B> = Box<
        dyn Fn(&A, &Generator<'_, <A as Trap>::Elem>, &mut ChaCha8Rng) -> Option<(Vec<<A as Trap>::Elem>, Result<<B as Trap>::Elem>, Result<<B as Trap>::Elem>)>
            + Sync
            + 'a,
    >;
    let phi = &phi;
    let mut checks: Vec<(&str, MCheck<'_, A, B>)> = vec![
        (
            "morphism.equivariance",
            Box::new(move |a: &A, g: &Generator<'_, A::Elem>, rng: &mut ChaCha8Rng| {
                let (k, l) = draw_arities(rng, cfg, &[0])[0];
                let p = g(rng, k, l);
                let (s, t) = (perm(rng, l), perm(rng, k));
                let lhs = a.act(&s, &p, &t).and_then(|x| phi(&x));
                let rhs = phi(&p).and_then(|x| dst.act(&s, &x, &t));
                Some((vec![p], lhs, rhs))
            }),
        ),
        (
            "morphism.unit0",
            Box::new(move |a: &A, _: &Generator<'_, A::Elem>, _: &mut ChaCha8Rng| {
                Some((vec![a.unit0()], phi(&a.unit0()), Ok(dst.unit0())))
            }),
        ),
        (
            "morphism.hconcat",
            Box::new(move |a: &A, g: &Generator<'_, A::Elem>, rng: &mut ChaCha8Rng| {
                let ar = draw_arities(rng, cfg, &[0, 0]);
                let (p, q) = (g(rng, ar[0].0, ar[0].1), g(rng, ar[1].0, ar[1].1));
                let lhs = a.hconcat(&p, &q).and_then(|x| phi(&x));
                let rhs = phi(&p).and_then(|x| Ok((x, phi(&q)?))).and_then(|(x, y)| dst.hconcat(&x, &y));
                Some((vec![p, q], lhs, rhs))
            }),
        ),
        (
            "morphism.t11",
            Box::new(move |a: &A, g: &Generator<'_, A::Elem>, rng: &mut ChaCha8Rng| {
                let (k, l) = draw_arities(rng, cfg, &[1])[0];
                let p = g(rng, k, l);
                let lhs = a.partial_trace(&p, 1, 1).and_then(|x| phi(&x));
                let rhs = phi(&p).and_then(|x| dst.partial_trace(&x, 1, 1));
                Some((vec![p], lhs, rhs))
            }),
        ),
        (
            "morphism.tij",
            Box::new(move |a: &A, g: &Generator<'_, A::Elem>, rng: &mut ChaCha8Rng| {
                let (k, l) = draw_arities(rng, cfg, &[1])[0];
                let p = g(rng, k, l);
                let (i, j) = (rng.gen_range(1..=k), rng.gen_range(1..=l));
                let lhs = a.partial_trace(&p, i, j).and_then(|x| phi(&x));
                let rhs = phi(&p).and_then(|x| dst.partial_trace(&x, i, j));
                Some((vec![p], lhs, rhs))
            }),
        ),
    ];
    if let (Some(u), Some(v)) = (src.unit1(), dst.unit1()) {
        checks.push((
            "morphism.unit1",
            Box::new(move |_: &A, _: &Generator<'_, A::Elem>, _: &mut ChaCha8Rng| {
                Some((vec![u.clone()], phi(&u), Ok(v.clone())))
            }),
        ));
    }

    let axioms = checks
        .iter()
        .enumerate()
        .map(|(ai, (name, check))| {
            let trials = if *name == "morphism.unit0" || *name == "morphism.unit1" { 1 } else { cfg.trials };
            let failures: Vec<Failure> = (0..trials)
                .into_par_iter()
                .filter_map(|t| {
                    let seed = trial_seed(cfg.seed, 100 + ai, t);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let (inputs, lhs, rhs) = check(src, gen, &mut rng)?;
                    let ok = matches!((&lhs, &rhs), (Ok(x), Ok(y)) if dst.eq(x, y));
                    (!ok).then(|| Failure {
                        seed,
                        inputs: inputs.iter().map(|e| src.to_json(e)).collect(),
                        lhs: json_err(dst, &lhs),
                        rhs: json_err(dst, &rhs),
                    })
                })
                .collect();
            AxiomReport {
                axiom: name.to_string(),
                trials,
                failures,
            }
        })
        .collect();
    Report {
        backend: format!("{} -> {}", src.name(), dst.name()),
        axioms,
    }
}
