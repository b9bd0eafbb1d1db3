use std::fmt::Write as _;

use super::{Backend, Decoration, Diagnostic, GraphDoc, Pos, PortRef, Statement, TensorLit};

const MAX_DEPTH: usize = 32;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(String),
    Sym(&'static str),
    Newline,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Num(s) => format!("number `{s}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let start = i;
        let tok = match c {
            '\n' => {
                i += 1;
                Tok::Newline
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 2;
                Tok::Sym("->")
            }
            '<' if chars.get(i + 1) == Some(&'-') => {
                i += 2;
                Tok::Sym("<-")
            }
            ':' | '=' | '.' | '[' | ']' | '(' | ')' | ',' => {
                i += 1;
                Tok::Sym(match c {
                    ':' => ":",
                    '=' => "=",
                    '.' => ".",
                    '[' => "[",
                    ']' => "]",
                    '(' => "(",
                    ')' => ")",
                    _ => ",",
                })
            }
            '"' => {
                i += 1;
                while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                    i += if chars[i] == '\\' { 2 } else { 1 };
                }
                if i >= chars.len() || chars[i] != '"' {
                    return Err(Diagnostic::syntax(pos, "unterminated string"));
                }
                i += 1;
                let raw: String = chars[start..i].iter().collect();
                let s = serde_json::from_str(&raw).map_err(|_| Diagnostic::syntax(pos, "invalid escape in string"))?;
                Tok::Str(s)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' => {
                i += 1;
                let digits = |i: &mut usize| {
                    let s = *i;
                    while *i < chars.len() && chars[*i].is_ascii_digit() {
                        *i += 1;
                    }
                    *i > s
                };
                let mut ok = c.is_ascii_digit() || digits(&mut i);
                if ok {
                    digits(&mut i);
                    if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(char::is_ascii_digit) {
                        i += 1;
                        digits(&mut i);
                    }
                    if matches!(chars.get(i), Some('e' | 'E')) {
                        i += 1;
                        if matches!(chars.get(i), Some('+' | '-')) {
                            i += 1;
                        }
                        ok = digits(&mut i);
                    }
                }
                if !ok {
                    return Err(Diagnostic::syntax(pos, "malformed number"));
                }
                Tok::Num(chars[start..i].iter().collect())
            }
            other => return Err(Diagnostic::syntax(pos, format!("unexpected character {other:?}"))),
        };
        if tok == Tok::Newline {
            line += 1;
            col = 1;
        } else {
            col += i - start;
        }
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, Diagnostic> {
        Err(Diagnostic::syntax(self.pos(), format!("expected {expected}, found {}", self.peek().describe())))
    }

    fn sym(&mut self, s: &'static str) -> Result<(), Diagnostic> {
        if *self.peek() == Tok::Sym(s) {
            self.bump();
            Ok(())
        } else {
            self.fail(&format!("`{s}`"))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), Diagnostic> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => self.fail(&format!("`{kw}`")),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, Diagnostic> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail(what),
        }
    }

    fn int(&mut self) -> Result<usize, Diagnostic> {
        let pos = self.pos();
        match self.peek() {
            Tok::Num(s) => {
                let n = s.parse().map_err(|_| Diagnostic::syntax(pos, format!("`{s}` is not a non-negative integer")))?;
                self.bump();
                Ok(n)
            }
            _ => self.fail("an integer"),
        }
    }

    fn number(&mut self) -> Result<f64, Diagnostic> {
        let pos = self.pos();
        match self.peek() {
            Tok::Num(s) => {
                let x: f64 = s.parse().map_err(|_| Diagnostic::syntax(pos, format!("`{s}` is not a number")))?;
                if !x.is_finite() {
                    return Err(Diagnostic::syntax(pos, format!("`{s}` is out of range")));
                }
                self.bump();
                Ok(x)
            }
            _ => self.fail("a number"),
        }
    }

    fn assign(&mut self, key: &str) -> Result<usize, Diagnostic> {
        self.keyword(key)?;
        self.sym("=")?;
        self.int()
    }

    fn port(&mut self, side: &str) -> Result<PortRef, Diagnostic> {
        let vertex = self.ident("a vertex name")?;
        self.sym(".")?;
        self.keyword(side)?;
        self.sym("[")?;
        let slot = self.int()?;
        self.sym("]")?;
        Ok(PortRef { vertex, slot })
    }

    fn tensor(&mut self, depth: usize) -> Result<TensorLit, Diagnostic> {
        if depth > MAX_DEPTH {
            return Err(Diagnostic::syntax(self.pos(), "tensor literal nested too deeply"));
        }
        if *self.peek() != Tok::Sym("[") {
            return self.number().map(TensorLit::Scalar);
        }
        self.bump();
        let mut items = Vec::new();
        if *self.peek() != Tok::Sym("]") {
            items.push(self.tensor(depth + 1)?);
            while *self.peek() == Tok::Sym(",") {
                self.bump();
                items.push(self.tensor(depth + 1)?);
            }
        }
        self.sym("]")?;
        Ok(TensorLit::List(items))
    }

    fn decoration(&mut self) -> Result<Decoration, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::Sym("(") {
                    self.bump();
                    let param = self.number()?;
                    self.sym(")")?;
                    Ok(Decoration::Call { name, param })
                } else {
                    Ok(Decoration::Name(name))
                }
            }
            Tok::Str(name) => {
                self.bump();
                Ok(Decoration::Name(name))
            }
            Tok::Num(_) | Tok::Sym("[") => self.tensor(0).map(Decoration::Tensor),
            _ => self.fail("a decoration"),
        }
    }

    fn backend(&mut self) -> Result<Backend, Diagnostic> {
        let pos = self.pos();
        let kind = self.ident("`graph`, `homv` or `kernel`")?;
        let bad = |m: String| Err(Diagnostic::semantic(pos, m));
        match kind.as_str() {
            "graph" => Ok(Backend::Graph),
            "homv" => {
                let dim = self.assign("dim")?;
                if dim == 0 {
                    return bad("homv needs dim >= 1".into());
                }
                Ok(Backend::Homv { dim })
            }
            "kernel" => {
                let n_points = self.assign("n")?;
                let torus_dim = if matches!(self.peek(), Tok::Ident(s) if s == "dim") { self.assign("dim")? } else { 1 };
                if !(3..=4096).contains(&n_points) {
                    return bad(format!("kernel grids need 3 <= n <= 4096, got {n_points}"));
                }
                if !(1..=2).contains(&torus_dim) {
                    return bad(format!("kernel torus dimension must be 1 or 2, got {torus_dim}"));
                }
                Ok(Backend::Kernel { n_points, torus_dim })
            }
            other => Err(Diagnostic::syntax(pos, format!("unknown backend `{other}`"))),
        }
    }

    fn statement(&mut self, keyword: &str) -> Result<Statement, Diagnostic> {
        Ok(match keyword {
            "vertex" => {
                let name = self.ident("a vertex name")?;
                self.sym(":")?;
                let decoration = self.decoration()?;
                let ins = self.assign("in")?;
                let outs = self.assign("out")?;
                Statement::Vertex { name, decoration, ins, outs }
            }
            "edge" => {
                let from = self.port("out")?;
                self.sym("->")?;
                let to = self.port("in")?;
                Statement::Edge { from, to }
            }
            "input" => {
                let index = self.int()?;
                self.sym("->")?;
                let to = self.port("in")?;
                Statement::Input { index, to }
            }
            "output" => {
                let index = self.int()?;
                self.sym("<-")?;
                let from = self.port("out")?;
                Statement::Output { index, from }
            }
            "io" => {
                let input = self.int()?;
                self.sym("->")?;
                let output = self.int()?;
                Statement::Io { input, output }
            }
            "loop" => Statement::Loop,
            _ => unreachable!(),
        })
    }

    fn document(&mut self) -> Result<GraphDoc, Diagnostic> {
        let mut doc = GraphDoc::default();
        let mut backend_at: Option<Pos> = None;
        loop {
            let pos = self.pos();
            match self.bump() {
                Tok::Eof => return Ok(doc),
                Tok::Newline => continue,
                Tok::Ident(kw) if kw == "backend" => {
                    if let Some(prev) = backend_at {
                        return Err(Diagnostic::semantic(pos, format!("backend already declared at line {}", prev.line)));
                    }
                    backend_at = Some(pos);
                    doc.backend = self.backend()?;
                }
                Tok::Ident(kw) if matches!(kw.as_str(), "vertex" | "edge" | "input" | "output" | "io" | "loop") => {
                    let s = self.statement(&kw)?;
                    doc.statements.push(s);
                    doc.positions.push(pos);
                }
                other => {
                    return Err(Diagnostic::syntax(
                        pos,
                        format!("expected a statement (backend, vertex, edge, input, output, io, loop), found {}", other.describe()),
                    ))
                }
            }
            if !matches!(self.peek(), Tok::Newline | Tok::Eof) {
                return self.fail("end of line");
            }
        }
    }
}

/// Parses a document. Only syntax (and backend parameter) errors are
/// reported here; graph-level checks happen in [`GraphDoc::graph`].
pub fn parse(text: &str) -> Result<GraphDoc, Diagnostic> {
    Parser { toks: lex(text)?, at: 0 }.document()
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Renders a document so that `parse(&unparse(d)) == Ok(d)`.
pub fn unparse(doc: &GraphDoc) -> String {
    let mut out = String::new();
    match doc.backend {
        Backend::Graph => out.push_str("backend graph\n"),
        Backend::Homv { dim } => writeln!(out, "backend homv dim={dim}").unwrap(),
        Backend::Kernel { n_points, torus_dim } => writeln!(out, "backend kernel n={n_points} dim={torus_dim}").unwrap(),
    }
    for s in &doc.statements {
        match s {
            Statement::Vertex { name, decoration, ins, outs } => {
                let dec = match decoration {
                    Decoration::Name(n) if !is_ident(n) => serde_json::to_string(n).unwrap(),
                    d => d.to_string(),
                };
                writeln!(out, "vertex {name} : {dec} in={ins} out={outs}")
            }
            Statement::Edge { from, to } => writeln!(out, "edge {}.out[{}] -> {}.in[{}]", from.vertex, from.slot, to.vertex, to.slot),
            Statement::Input { index, to } => writeln!(out, "input {index} -> {}.in[{}]", to.vertex, to.slot),
            Statement::Output { index, from } => writeln!(out, "output {index} <- {}.out[{}]", from.vertex, from.slot),
            Statement::Io { input, output } => writeln!(out, "io {input} -> {output}"),
            Statement::Loop => writeln!(out, "loop"),
        }
        .unwrap();
    }
    out
}
