//! The `.trapg` graph description language, JSON forms and DOT export.
//!
//! ```text
//! backend homv dim=2
//! vertex a : [[1, 2], [3, 4]] in=1 out=1
//! input 1 -> a.in[1]
//! output 1 <- a.out[1]
//! ```
//!
//! The grammar is documented in `docs/grammar.ebnf`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, Graph, Head, Tail, Vertex};
use crate::homv::DenseTensor;
use crate::kernel::{random_band_limited, GridKernel, NamedKernel, TorusGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub mod dot;
pub mod json;
mod parser;

pub use parser::{parse, unparse};

/// Where a diagnostic points: 1-based line and column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    Semantic,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: {} error: {message}", match .kind { DiagnosticKind::Syntax => "syntax", DiagnosticKind::Semantic => "semantic" })]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub pos: Pos,
    pub message: String,
}

impl Diagnostic {
    pub fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        Self {
            kind: DiagnosticKind::Syntax,
            pos,
            message: message.into(),
        }
    }

    pub fn semantic(pos: Pos, message: impl Into<String>) -> Self {
        Self {
            kind: DiagnosticKind::Semantic,
            pos,
            message: message.into(),
        }
    }
}

/// Which TRAP the decorations live in.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Backend {
    /// Opaque labels.
    #[default]
    Graph,
    Homv { dim: usize },
    Kernel { n_points: usize, torus_dim: usize },
}

/// Nested numeric literal; its nesting depth is the number of axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TensorLit {
    Scalar(f64),
    List(Vec<TensorLit>),
}

impl TensorLit {
    /// Shape and row-major entries, or `None` for ragged literals.
    pub fn flatten(&self) -> Option<(Vec<usize>, Vec<f64>)> {
        match self {
            TensorLit::Scalar(x) => Some((Vec::new(), vec![*x])),
            TensorLit::List(items) => {
                let mut shape = None;
                let mut data = Vec::new();
                for item in items {
                    let (s, d) = item.flatten()?;
                    if shape.get_or_insert_with(|| s.clone()) != &s {
                        return None;
                    }
                    data.extend(d);
                }
                let mut s = vec![items.len()];
                s.extend(shape.unwrap_or_default());
                Some((s, data))
            }
        }
    }

    /// Nests `data` according to `shape`.
    pub fn from_flat(shape: &[usize], data: &[f64]) -> Self {
        match shape.split_first() {
            None => TensorLit::Scalar(data[0]),
            Some((&n, rest)) => {
                let chunk = rest.iter().product::<usize>();
                TensorLit::List((0..n).map(|i| Self::from_flat(rest, &data[i * chunk..(i + 1) * chunk])).collect())
            }
        }
    }
}

/// Vertex decoration as written: a name, a name with one parameter, or a
/// tensor literal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Decoration {
    Name(String),
    Tensor(TensorLit),
    Call { name: String, param: f64 },
}

impl fmt::Display for Decoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn lit(t: &TensorLit, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                TensorLit::Scalar(x) => write!(f, "{x:?}"),
                TensorLit::List(items) => {
                    write!(f, "[")?;
                    for (i, it) in items.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        lit(it, f)?;
                    }
                    write!(f, "]")
                }
            }
        }
        match self {
            Decoration::Name(n) => write!(f, "{n}"),
            Decoration::Call { name, param } => write!(f, "{name}({param:?})"),
            Decoration::Tensor(t) => lit(t, f),
        }
    }
}

impl From<String> for Decoration {
    fn from(name: String) -> Self {
        Decoration::Name(name)
    }
}

impl From<&DenseTensor> for Decoration {
    fn from(t: &DenseTensor) -> Self {
        Decoration::Tensor(TensorLit::from_flat(&vec![t.dim(); t.k() + t.l()], t.data()))
    }
}

/// Text of `g` with vertices named `v1, v2, …`.
pub fn unparse_graph(g: &Graph<Decoration>, backend: Backend) -> String {
    unparse(&GraphDoc::from_graph(g, backend))
}

/// `a.in[t]` or `a.out[s]`, slot 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct PortRef {
    pub vertex: String,
    pub slot: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Vertex {
        name: String,
        decoration: Decoration,
        ins: usize,
        outs: usize,
    },
    Edge {
        from: PortRef,
        to: PortRef,
    },
    Input {
        index: usize,
        to: PortRef,
    },
    Output {
        index: usize,
        from: PortRef,
    },
    Io {
        input: usize,
        output: usize,
    },
    Loop,
}

/// A parsed document. Equality ignores source positions.
#[derive(Clone, Debug, Default)]
pub struct GraphDoc {
    pub backend: Backend,
    pub statements: Vec<Statement>,
    /// Position of each statement, for diagnostics.
    pub positions: Vec<Pos>,
}

impl PartialEq for GraphDoc {
    fn eq(&self, other: &Self) -> bool {
        self.backend == other.backend && self.statements == other.statements
    }
}

impl GraphDoc {
    pub fn push(&mut self, s: Statement) {
        let line = self.positions.last().map_or(1, |p| p.line + 1);
        self.statements.push(s);
        self.positions.push(Pos { line, col: 1 });
    }

    /// The described graph, after checking that every slot and every global
    /// index is used exactly once.
    pub fn graph(&self) -> Result<Graph<Decoration>, Diagnostic> {
        Elaborator::default().run(self)
    }

    /// Document describing `g` with vertices named `v1, v2, …` and one
    /// statement per edge in edge order, so that `graph()` rebuilds `g`
    /// exactly.
    pub fn from_graph(g: &Graph<Decoration>, backend: Backend) -> Self {
        let name = |v: usize| format!("v{}", v + 1);
        let mut doc = GraphDoc {
            backend,
            ..Default::default()
        };
        for (v, vert) in g.vertices().iter().enumerate() {
            doc.push(Statement::Vertex {
                name: name(v),
                decoration: vert.decoration.clone(),
                ins: vert.ins.len(),
                outs: vert.outs.len(),
            });
        }
        for (e, edge) in g.edges().iter().enumerate() {
            let to = || {
                let (v, s) = g.in_slot_of(e).expect("edge with a target");
                PortRef { vertex: name(v), slot: s + 1 }
            };
            let from = || {
                let (v, s) = g.out_slot_of(e).expect("edge with a source");
                PortRef { vertex: name(v), slot: s + 1 }
            };
            let stmt = match edge {
                Edge::Loop => Statement::Loop,
                Edge::Link { tail: Tail::Input(i), head: Head::Output(j) } => Statement::Io { input: *i, output: *j },
                Edge::Link { tail: Tail::Input(i), head: Head::Vertex(_) } => Statement::Input { index: *i, to: to() },
                Edge::Link { tail: Tail::Vertex(_), head: Head::Output(j) } => Statement::Output { index: *j, from: from() },
                Edge::Link { tail: Tail::Vertex(_), head: Head::Vertex(_) } => Statement::Edge { from: from(), to: to() },
            };
            doc.push(stmt);
        }
        doc
    }

    fn vertex_positions(&self) -> Vec<Pos> {
        self.statements
            .iter()
            .zip(&self.positions)
            .filter(|(s, _)| matches!(s, Statement::Vertex { .. }))
            .map(|(_, p)| *p)
            .collect()
    }

    /// Graph decorated by labels; only bare names are allowed.
    pub fn label_graph(&self) -> Result<Graph<String>, Diagnostic> {
        let g = self.graph()?;
        let pos = self.vertex_positions();
        g.try_map_decorations(|v, d| {
            let p = pos[v];
            match d {
                Decoration::Name(n) => Ok(n),
                other => Err(Diagnostic::semantic(p, format!("`{other}` is not a label"))),
            }
        })
    }

    /// Graph decorated by tensors over a space of dimension `dim`. Literals
    /// list the input axes first; `identity`, `ones` and `delta` (1 where all
    /// indices agree) are also accepted, as is `random`, drawn from a
    /// generator seeded with `seed` in vertex order.
    pub fn homv_graph(&self, dim: usize, seed: u64) -> Result<Graph<DenseTensor>, Diagnostic> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = self.graph()?;
        let pos = self.vertex_positions();
        let arities: Vec<(usize, usize)> = g.vertices().iter().map(|v| v.arity()).collect();
        g.try_map_decorations(|v, d| {
            let (p, (k, l)) = (pos[v], arities[v]);
            let err = |m: String| Diagnostic::semantic(p, m);
            let n = entries(dim, k + l).ok_or_else(|| err(format!("a ({k}, {l}) tensor at dim {dim} is too large")))?;
            let data = match d {
                Decoration::Tensor(t) => {
                    let (shape, data) = t.flatten().ok_or_else(|| err("ragged tensor literal".into()))?;
                    if shape != vec![dim; k + l] {
                        return Err(err(format!(
                            "tensor literal has shape {shape:?}, vertex of arity ({k}, {l}) at dim {dim} needs {:?}",
                            vec![dim; k + l]
                        )));
                    }
                    data
                }
                Decoration::Name(name) if name == "ones" => vec![1.0; n],
                Decoration::Name(name) if name == "random" => DenseTensor::random(&mut rng, k, l, dim).into_data(),
                Decoration::Name(name) if name == "identity" || name == "delta" => {
                    if name == "identity" && (k, l) != (1, 1) {
                        return Err(err(format!("identity has arity (1, 1), not ({k}, {l})")));
                    }
                    let diag: usize = (0..k + l).map(|a| dim.pow(a as u32)).sum();
                    (0..n).map(|r| if k + l == 0 || r % diag == 0 { 1.0 } else { 0.0 }).collect()
                }
                other => return Err(err(format!("`{other}` is not a tensor"))),
            };
            DenseTensor::new(k, l, dim, data).map_err(|e| err(e.to_string()))
        })
    }

    /// Graph decorated by named kernels sampled on `grid`. `random` and
    /// `random(f)` draw band-limited kernels with frequencies up to `f`
    /// (default 2) from a generator seeded with `seed`.
    pub fn kernel_graph(&self, grid: TorusGrid, seed: u64) -> Result<Graph<GridKernel>, Diagnostic> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = self.graph()?;
        let pos = self.vertex_positions();
        let arities: Vec<(usize, usize)> = g.vertices().iter().map(|v| v.arity()).collect();
        g.try_map_decorations(|v, d| {
            let (p, (k, l)) = (pos[v], arities[v]);
            let err = |m: String| Diagnostic::semantic(p, m);
            entries(grid.extent(), k + l).ok_or_else(|| err(format!("a ({k}, {l}) kernel on this grid is too large")))?;
            let band = match &d {
                Decoration::Name(n) if n == "random" => Some(2.0),
                Decoration::Call { name, param } if name == "random" => Some(*param),
                _ => None,
            };
            if let Some(f) = band {
                if f.fract() != 0.0 || !(0.0..=64.0).contains(&f) {
                    return Err(err(format!("random({f}) needs an integer band between 0 and 64")));
                }
                return Ok(random_band_limited(&mut rng, k, l, grid, f as usize));
            }
            let named: NamedKernel = match &d {
                Decoration::Name(n) => n.parse::<NamedKernel>(),
                Decoration::Call { name, param } => format!("{name}({param})").parse::<NamedKernel>(),
                Decoration::Tensor(_) => return Err(err("kernel backends take named kernels, not literals".into())),
            }
            .map_err(|e| err(e.to_string()))?;
            named.sample(k, l, grid).map_err(|e| err(e.to_string()))
        })
    }
}

/// Largest element a document may ask for.
const MAX_ENTRIES: usize = 1 << 24;

fn entries(extent: usize, legs: usize) -> Option<usize> {
    u32::try_from(legs).ok().and_then(|e| extent.checked_pow(e)).filter(|&n| n <= MAX_ENTRIES)
}

#[derive(Default)]
struct Elaborator {
    names: HashMap<String, usize>,
    /// Per vertex: `(ins, outs)` slot occupancy with the statement position.
    slots: Vec<(Vec<Option<(usize, Pos)>>, Vec<Option<(usize, Pos)>>)>,
    inputs: HashMap<usize, Pos>,
    outputs: HashMap<usize, Pos>,
}

impl Elaborator {
    fn run(mut self, doc: &GraphDoc) -> Result<Graph<Decoration>, Diagnostic> {
        let mut decorations = Vec::new();
        let mut vpos = Vec::new();
        for (s, &p) in doc.statements.iter().zip(&doc.positions) {
            if let Statement::Vertex { name, decoration, ins, outs } = s {
                let wiring = doc.statements.len() - 1;
                if ins.saturating_add(*outs) > 2 * wiring {
                    return Err(Diagnostic::semantic(
                        p,
                        format!("`{name}` has {} slots but the document's {wiring} other statements can connect at most {}", ins.saturating_add(*outs), 2 * wiring),
                    ));
                }
                if self.names.insert(name.clone(), decorations.len()).is_some() {
                    return Err(Diagnostic::semantic(p, format!("vertex `{name}` declared twice")));
                }
                decorations.push(decoration.clone());
                vpos.push(p);
                self.slots.push((vec![None; *ins], vec![None; *outs]));
            }
        }
        let mut edges = Vec::new();
        for (s, &p) in doc.statements.iter().zip(&doc.positions) {
            let e = edges.len();
            let edge = match s {
                Statement::Vertex { .. } => continue,
                Statement::Loop => Edge::Loop,
                Statement::Io { input, output } => Edge::Link {
                    tail: Tail::Input(self.global(true, *input, p)?),
                    head: Head::Output(self.global(false, *output, p)?),
                },
                Statement::Input { index, to } => Edge::Link {
                    tail: Tail::Input(self.global(true, *index, p)?),
                    head: Head::Vertex(self.slot(to, true, e, p)?),
                },
                Statement::Output { index, from } => Edge::Link {
                    tail: Tail::Vertex(self.slot(from, false, e, p)?),
                    head: Head::Output(self.global(false, *index, p)?),
                },
                Statement::Edge { from, to } => Edge::Link {
                    tail: Tail::Vertex(self.slot(from, false, e, p)?),
                    head: Head::Vertex(self.slot(to, true, e, p)?),
                },
            };
            edges.push(edge);
        }
        for (what, used) in [("input", &self.inputs), ("output", &self.outputs)] {
            let n = used.len();
            if let Some((&m, &p)) = used.iter().filter(|(&m, _)| m > n).min_by_key(|(&m, _)| m) {
                let missing = (1..=n).find(|i| !used.contains_key(i)).unwrap_or(n);
                return Err(Diagnostic::semantic(
                    p,
                    format!("{what} {m} used but {what} {missing} is missing; {what}s must be numbered 1..{n}"),
                ));
            }
        }
        let mut vertices = Vec::new();
        for (v, (dec, (ins, outs))) in decorations.into_iter().zip(self.slots).enumerate() {
            let take = |slots: Vec<Option<(usize, Pos)>>, side: &str| {
                slots
                    .into_iter()
                    .enumerate()
                    .map(|(s, x)| {
                        x.map(|(e, _)| e).ok_or_else(|| {
                            Diagnostic::semantic(vpos[v], format!("{side}[{}] of this vertex is not connected", s + 1))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            };
            vertices.push(Vertex {
                decoration: dec,
                ins: take(ins, "in")?,
                outs: take(outs, "out")?,
            });
        }
        Graph::from_parts(vertices, edges).map_err(|e| Diagnostic::semantic(Pos::default(), e.to_string()))
    }

    fn global(&mut self, input: bool, index: usize, p: Pos) -> Result<usize, Diagnostic> {
        let (used, what) = if input { (&mut self.inputs, "input") } else { (&mut self.outputs, "output") };
        if index == 0 {
            return Err(Diagnostic::semantic(p, format!("{what} indices start at 1")));
        }
        if let Some(prev) = used.insert(index, p) {
            return Err(Diagnostic::semantic(
                p,
                format!("{what} {index} already used at line {}; each {what} index must occur exactly once", prev.line),
            ));
        }
        Ok(index)
    }

    fn slot(&mut self, port: &PortRef, input: bool, edge: usize, p: Pos) -> Result<usize, Diagnostic> {
        let v = *self
            .names
            .get(&port.vertex)
            .ok_or_else(|| Diagnostic::semantic(p, format!("unknown vertex `{}`", port.vertex)))?;
        let side = if input { &mut self.slots[v].0 } else { &mut self.slots[v].1 };
        let what = if input { "in" } else { "out" };
        let n = side.len();
        let slot = side
            .get_mut(port.slot.wrapping_sub(1))
            .ok_or_else(|| Diagnostic::semantic(p, format!("`{}` has {n} {what}-slots, no {what}[{}]", port.vertex, port.slot)))?;
        if let Some((_, prev)) = slot {
            return Err(Diagnostic::semantic(
                p,
                format!("{}.{what}[{}] already connected at line {}", port.vertex, port.slot, prev.line),
            ));
        }
        *slot = Some((edge, p));
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::iso_eq;

    #[test]
    fn corolla_document() {
        let doc = parse("backend graph\nvertex a : x in=1 out=1\ninput 1 -> a.in[1]\noutput 1 <- a.out[1]").unwrap();
        let g = doc.label_graph().unwrap();
        assert!(iso_eq(&g, &Graph::corolla("x".to_string(), 1, 1)));
    }

    #[test]
    fn unit_document() {
        let g = parse("io 1 -> 1").unwrap().label_graph().unwrap();
        assert_eq!(g, Graph::unit());
    }

    #[test]
    fn self_edge_wires_two_slots() {
        let g = parse("vertex a : x in=1 out=1\nedge a.out[1] -> a.in[1]\n").unwrap().label_graph().unwrap();
        assert_eq!(g.arity(), (0, 0));
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn duplicate_input_is_a_semantic_error_with_line() {
        let text = "vertex a : x in=2 out=0\ninput 1 -> a.in[1]\ninput 1 -> a.in[2]\n";
        let err = parse(text).unwrap().graph().unwrap_err();
        assert_eq!(err.kind, DiagnosticKind::Semantic);
        assert_eq!(err.pos.line, 3);
        assert!(err.message.contains("exactly once"), "{}", err.message);
    }

    #[test]
    fn other_semantic_errors() {
        let cases = [
            ("vertex a : x in=1 out=0\nloop\n", 1, "not connected"),
            ("vertex a : x in=99999999999 out=0\n", 1, "slots"),
            ("vertex a : x in=0 out=0\nvertex a : y in=0 out=0\n", 2, "declared twice"),
            ("input 1 -> b.in[1]\n", 1, "unknown vertex"),
            ("vertex a : x in=1 out=0\ninput 1 -> a.in[2]\n", 2, "no in[2]"),
            ("io 2 -> 1\n", 1, "input 2 used"),
            ("vertex a : x in=0 out=2\noutput 1 <- a.out[1]\noutput 2 <- a.out[1]\n", 3, "already connected"),
        ];
        for (text, line, needle) in cases {
            let err = parse(text).unwrap().graph().unwrap_err();
            assert_eq!((err.pos.line, err.kind), (line, DiagnosticKind::Semantic), "{text}");
            assert!(err.message.contains(needle), "{text}: {}", err.message);
        }
    }

    #[test]
    fn tensor_literals() {
        let doc = parse("backend homv dim=2\nvertex a : [[1, 2], [3, 4]] in=1 out=1\ninput 1 -> a.in[1]\noutput 1 <- a.out[1]").unwrap();
        assert_eq!(doc.backend, Backend::Homv { dim: 2 });
        let g = doc.homv_graph(2, 0).unwrap();
        assert_eq!(g.vertices()[0].decoration.data(), &[1.0, 2.0, 3.0, 4.0]);
        let err = doc.homv_graph(3, 0).unwrap_err();
        assert!(err.message.contains("shape"), "{}", err.message);
        assert_eq!(err.pos.line, 2);
    }

    #[test]
    fn named_tensors() {
        let doc = parse("vertex d : delta in=1 out=2\nvertex o : ones in=0 out=0\ninput 1 -> d.in[1]\noutput 1 <- d.out[1]\noutput 2 <- d.out[2]").unwrap();
        let g = doc.homv_graph(2, 0).unwrap();
        let d = &g.vertices()[0].decoration;
        assert_eq!(d.get(&[1], &[1, 1]), Some(1.0));
        assert_eq!(d.get(&[1], &[0, 1]), Some(0.0));
        assert_eq!(d.data().iter().sum::<f64>(), 2.0);
        assert_eq!(g.vertices()[1].decoration.as_scalar(), Some(1.0));
    }

    #[test]
    fn kernel_decorations() {
        let doc = parse("backend kernel n=8\nvertex h : gauss_heat(0.5) in=1 out=1\nvertex c : coscos in=1 out=1\nedge h.out[1] -> c.in[1]\ninput 1 -> h.in[1]\noutput 1 <- c.out[1]").unwrap();
        assert_eq!(doc.backend, Backend::Kernel { n_points: 8, torus_dim: 1 });
        let g = doc.kernel_graph(TorusGrid::new(8, 1).unwrap(), 0).unwrap();
        assert_eq!(g.vertices().len(), 2);
        assert!(parse("vertex h : [1] in=1 out=0\ninput 1 -> h.in[1]").unwrap().kernel_graph(TorusGrid::new(8, 1).unwrap(), 0).is_err());
    }

    #[test]
    fn homv_graph_round_trips_through_text() {
        let t = DenseTensor::new(1, 2, 2, (0..8).map(f64::from).collect()).unwrap();
        let g = Graph::corolla(t.clone(), 1, 2).vconcat(&Graph::corolla(DenseTensor::identity(2), 1, 1)).unwrap();
        let text = unparse_graph(&g.clone().map_decorations(|d| Decoration::from(&d)), Backend::Homv { dim: 2 });
        let back = parse(&text).unwrap().homv_graph(2, 0).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn tensor_literal_round_trip() {
        let t = TensorLit::from_flat(&[2, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(t.flatten().unwrap(), (vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]));
        let ragged = TensorLit::List(vec![TensorLit::Scalar(1.0), TensorLit::List(vec![])]);
        assert!(ragged.flatten().is_none());
    }
}
