//! `trap`: validate, evaluate, compose, trace, render and fuzz-check TRAP
//! graphs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::{json, Value};

use trap_core::amplitude::{evaluate, plan, ContractionPlan};
use trap_core::axioms::{check_axioms, HarnessConfig, Report};
use trap_core::dsl::{self, dot::to_dot, json::graph_from_json, json::graph_to_value, Backend, Decoration, GraphDoc};
use trap_core::graph::{random_graph, GraphTrap, RandomGraphOptions};
use trap_core::homv::{DenseTensor, HomV};
use trap_core::kernel::{gtrace, random_band_limited, GridKernel, KernelTrap, TorusGrid};
use trap_core::upgr::UTrap;
use trap_core::Graph;

#[derive(Parser)]
#[command(name = "trap", version, about = "Partial traces on decorated graphs, tensors and kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that documents describe valid graphs.
    Validate {
        files: Vec<PathBuf>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Evaluate the amplitude of a decorated graph.
    Amplitude {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Vertical concatenation: the outputs of INNER feed the inputs of OUTER.
    Compose {
        outer: PathBuf,
        inner: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Glue input I to output J, or take the full trace when both are omitted.
    Trace {
        file: PathBuf,
        #[arg(long, requires = "output")]
        input: Option<usize>,
        #[arg(long, requires = "input")]
        output: Option<usize>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run the randomized axiom suite against a backend.
    Axioms {
        #[command(flatten)]
        opts: Opts,
        /// Largest arity of generated elements.
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
        /// Largest leg count of any element built during a trial.
        #[arg(long, default_value_t = 8)]
        max_legs: usize,
    },
    /// Render a graph in Graphviz DOT.
    Dot {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    Graph,
    Homv,
    Kernel,
    /// Unitary completion of the kernel backend (axioms only).
    UpgrKernel,
}

#[derive(Args)]
struct Opts {
    /// Overrides the backend declared in the document.
    #[arg(long, value_enum)]
    backend: Option<BackendKind>,
    /// Dimension of the homv backend.
    #[arg(long)]
    dim: Option<usize>,
    /// Grid points per axis of the kernel backend.
    #[arg(long)]
    n_points: Option<usize>,
    /// Torus dimension of the kernel backend (1 or 2).
    #[arg(long)]
    torus_dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Relative tolerance of numeric equality.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Include the contraction plan in the output.
    #[arg(long)]
    explain: bool,
    /// Write the JSON result to this file instead of stdout.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

enum Failure {
    /// Bad usage, unreadable input: exit 2.
    Usage(String),
    /// Invalid document, failed evaluation or failed axioms: exit 1.
    Invalid(String),
}

type CliResult<T> = Result<T, Failure>;

fn invalid(e: impl ToString) -> Failure {
    Failure::Invalid(e.to_string())
}

/// Resolved backend: document declaration overridden by flags.
#[derive(Clone, Copy)]
enum Resolved {
    Graph,
    Homv(usize),
    Kernel(TorusGrid),
    UpgrKernel(TorusGrid),
}

impl Opts {
    fn resolve(&self, declared: Backend) -> CliResult<Resolved> {
        let (d_dim, d_n, d_td) = match declared {
            Backend::Graph => (None, None, None),
            Backend::Homv { dim } => (Some(dim), None, None),
            Backend::Kernel { n_points, torus_dim } => (None, Some(n_points), Some(torus_dim)),
        };
        let kind = self.backend.unwrap_or(match declared {
            Backend::Graph => BackendKind::Graph,
            Backend::Homv { .. } => BackendKind::Homv,
            Backend::Kernel { .. } => BackendKind::Kernel,
        });
        let grid = || {
            let n = self.n_points.or(d_n).unwrap_or(16);
            let td = self.torus_dim.or(d_td).unwrap_or(1);
            TorusGrid::new(n, td).map_err(|e| Failure::Usage(e.to_string()))
        };
        Ok(match kind {
            BackendKind::Graph => Resolved::Graph,
            BackendKind::Homv => match self.dim.or(d_dim).unwrap_or(2) {
                0 => return Err(Failure::Usage("--dim must be at least 1".into())),
                d => Resolved::Homv(d),
            },
            BackendKind::Kernel => Resolved::Kernel(grid()?),
            BackendKind::UpgrKernel => Resolved::UpgrKernel(grid()?),
        })
    }

    fn homv(&self, dim: usize) -> HomV {
        let b = HomV::new(dim);
        match self.tolerance {
            Some(t) => b.with_tolerance(t),
            None => b,
        }
    }

    fn kernel(&self, grid: TorusGrid) -> KernelTrap {
        let b = KernelTrap::new(grid);
        match self.tolerance {
            Some(t) => b.with_tolerance(t),
            None => b,
        }
    }

    /// Writes `value` to `--json-out` or stdout.
    fn emit(&self, value: &Value) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
        match &self.json_out {
            Some(path) => fs::write(path, text + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
            None => {
                println!("{text}");
                Ok(())
            }
        }
    }
}

/// Reads a `.json` graph or a `.trapg` document.
fn load(path: &Path) -> CliResult<GraphDoc> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|x| x == "json") {
        let g: Graph<Decoration> = graph_from_json(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
        Ok(GraphDoc::from_graph(&g, Backend::Graph))
    } else {
        let doc = dsl::parse(&text).map_err(located(path))?;
        doc.graph().map_err(located(path))?;
        Ok(doc)
    }
}

fn located(path: &Path) -> impl Fn(dsl::Diagnostic) -> Failure + '_ {
    move |e| Failure::Invalid(format!("{}:{e}", path.display()))
}

fn tensor_json(t: &DenseTensor) -> Value {
    let mut v = json!({
        "kind": "tensor",
        "k": t.k(),
        "l": t.l(),
        "dim": t.dim(),
        "shape": vec![t.dim(); t.k() + t.l()],
        "data": t.data(),
    });
    if let Some(x) = t.as_scalar() {
        v["value"] = json!(x);
    }
    v
}

fn kernel_json(p: &GridKernel) -> Value {
    let (k, l) = p.arity();
    let grid = p.grid();
    let mut v = json!({
        "kind": "kernel",
        "k": k,
        "l": l,
        "n_points": grid.n_points(),
        "torus_dim": grid.torus_dim(),
        "weight": grid.weight(),
        "shape": vec![grid.extent(); k + l],
        "samples": p.samples(),
    });
    if let Some(x) = p.as_scalar() {
        v["value"] = json!(x);
    } else if k == l {
        if let Ok(t) = gtrace(p) {
            v["trace"] = json!(t);
        }
    }
    v
}

fn summarize(values: &[f64]) -> String {
    let max = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    format!("{} entries, max |entry| {max:.6e}", values.len())
}

fn amplitude(file: &Path, opts: &Opts) -> CliResult<()> {
    let doc = load(file)?;
    let resolved = opts.resolve(doc.backend)?;
    let explain = |g_plan: Option<ContractionPlan>, mut out: Value| {
        if let Some(p) = g_plan {
            out["plan"] = serde_json::to_value(p).expect("plans serialize");
        }
        out
    };
    let out = match resolved {
        Resolved::Homv(dim) => {
            let g = doc.homv_graph(dim, opts.seed).map_err(located(file))?;
            let backend = opts.homv(dim);
            let p = plan(&g, dim).map_err(invalid)?;
            let t = evaluate(&g, &backend, Some(&p)).map_err(invalid)?;
            eprintln!("amplitude: ({}, {}) tensor over dim {dim}, {}", t.k(), t.l(), summarize(t.data()));
            explain(opts.explain.then_some(p), json!({ "backend": { "homv": { "dim": dim } }, "amplitude": tensor_json(&t) }))
        }
        Resolved::Kernel(grid) => {
            let g = doc.kernel_graph(grid, opts.seed).map_err(located(file))?;
            let backend = opts.kernel(grid);
            let p = plan(&g, grid.extent()).map_err(invalid)?;
            let t = evaluate(&g, &backend, Some(&p)).map_err(invalid)?;
            let (k, l) = t.arity();
            eprintln!("amplitude: ({k}, {l}) kernel on {} points of T^{}, {}", grid.n_points(), grid.torus_dim(), summarize(t.samples()));
            explain(
                opts.explain.then_some(p),
                json!({ "backend": { "kernel": { "n_points": grid.n_points(), "torus_dim": grid.torus_dim() } }, "amplitude": kernel_json(&t) }),
            )
        }
        Resolved::Graph | Resolved::UpgrKernel(_) => {
            return Err(Failure::Usage("amplitude needs a numeric backend: --backend homv or --backend kernel".into()))
        }
    };
    opts.emit(&out)
}

fn backend_decl(r: Resolved) -> Backend {
    match r {
        Resolved::Graph => Backend::Graph,
        Resolved::Homv(dim) => Backend::Homv { dim },
        Resolved::Kernel(g) | Resolved::UpgrKernel(g) => Backend::Kernel {
            n_points: g.n_points(),
            torus_dim: g.torus_dim(),
        },
    }
}

/// Prints `g` as a document, or as JSON under `--json-out`.
fn emit_graph(g: &Graph<Decoration>, backend: Backend, opts: &Opts) -> CliResult<()> {
    let (k, l) = g.arity();
    eprintln!("graph: {} vertices, {} edges, arity ({k}, {l})", g.vertices().len(), g.edges().len());
    if opts.json_out.is_some() {
        opts.emit(&graph_to_value(g))
    } else {
        print!("{}", dsl::unparse_graph(g, backend));
        Ok(())
    }
}

fn run_axioms(opts: &Opts, max_arity: usize, max_legs: usize) -> CliResult<Report> {
    let cfg = HarnessConfig {
        trials: opts.trials,
        seed: opts.seed,
        max_arity,
        max_legs,
    };
    let backend = opts.backend.ok_or_else(|| Failure::Usage("axioms needs --backend".into()))?;
    let declared = match backend {
        BackendKind::Graph => Backend::Graph,
        BackendKind::Homv => Backend::Homv { dim: 2 },
        BackendKind::Kernel | BackendKind::UpgrKernel => Backend::Kernel { n_points: 8, torus_dim: 1 },
    };
    Ok(match opts.resolve(declared)? {
        Resolved::Graph => {
            let gopts = RandomGraphOptions::default();
            check_axioms(
                &GraphTrap::<char>::unitary(),
                &|rng, k, l| random_graph(rng, k, l, &gopts, |rng, _, _| ['x', 'y', 'z'][rng.gen_range(0..3)]),
                &cfg,
            )
        }
        Resolved::Homv(dim) => {
            let b = opts.homv(dim);
            check_axioms(&b, &|rng, k, l| b.random(rng, k, l), &cfg)
        }
        Resolved::Kernel(grid) => {
            let b = opts.kernel(grid);
            check_axioms(&b, &|rng, k, l| random_band_limited(rng, k, l, grid, 2), &cfg)
        }
        Resolved::UpgrKernel(grid) => {
            let b = UTrap::new(opts.kernel(grid));
            check_axioms(&b, &|rng, k, l| b.random_element(rng, k, l, |rng, a, c| random_band_limited(rng, a, c, grid, 1)), &cfg)
        }
    })
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Validate { files, opts } => {
            if files.is_empty() {
                return Err(Failure::Usage("validate needs at least one file".into()));
            }
            let mut failed = Vec::new();
            for file in &files {
                let checked = load(file).and_then(|doc| {
                    let r = opts.resolve(doc.backend)?;
                    match r {
                        Resolved::Homv(dim) => doc.homv_graph(dim, opts.seed).map(drop),
                        Resolved::Kernel(grid) => doc.kernel_graph(grid, opts.seed).map(drop),
                        Resolved::Graph | Resolved::UpgrKernel(_) => doc.graph().map(drop),
                    }
                    .map_err(located(file))?;
                    Ok(doc.graph().expect("checked by load"))
                });
                match checked {
                    Ok(g) => {
                        let (k, l) = g.arity();
                        eprintln!("{}: ok, arity ({k}, {l}), {} vertices", file.display(), g.vertices().len());
                    }
                    Err(Failure::Invalid(m)) => {
                        eprintln!("{m}");
                        failed.push(m);
                    }
                    Err(usage) => return Err(usage),
                }
            }
            match failed.len() {
                0 => Ok(()),
                n => Err(Failure::Invalid(format!("{n} of {} documents invalid", files.len()))),
            }
        }
        Command::Amplitude { file, opts } => amplitude(&file, &opts),
        Command::Compose { outer, inner, opts } => {
            let (a, b) = (load(&outer)?, load(&inner)?);
            let g = a.graph().expect("checked by load").vconcat(&b.graph().expect("checked by load")).map_err(invalid)?;
            emit_graph(&g, backend_decl(opts.resolve(a.backend)?), &opts)
        }
        Command::Trace { file, input, output, opts } => {
            let doc = load(&file)?;
            let g = doc.graph().expect("checked by load");
            let traced = match (input, output) {
                (Some(i), Some(j)) => g.partial_trace(i, j),
                _ => g.gtrace(),
            }
            .map_err(invalid)?;
            emit_graph(&traced, backend_decl(opts.resolve(doc.backend)?), &opts)
        }
        Command::Axioms { opts, max_arity, max_legs } => {
            let report = run_axioms(&opts, max_arity, max_legs)?;
            for a in &report.axioms {
                eprintln!("{} {}: {} trials, {} failures", if a.passed() { "pass" } else { "FAIL" }, a.axiom, a.trials, a.failures.len());
            }
            opts.emit(&serde_json::to_value(&report).expect("reports serialize"))?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Invalid(format!("{}: axioms failed", report.backend)))
            }
        }
        Command::Dot { file, opts } => {
            let g = load(&file)?.graph().expect("checked by load");
            let text = to_dot(&g, |_, d| d.to_string());
            match &opts.json_out {
                Some(_) => opts.emit(&json!({ "dot": text })),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn init_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("TRAP_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("TRAP_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
