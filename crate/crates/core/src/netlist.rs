//! The `.msn` netlist format.
//!
//! ```text
//! # m1 in series with m2 parallel m3
//! space N=4 T=1
//! solver alpha=0.1 eps=1e-6 maxiter=1000
//! element m1: gain 1
//! element m2: gain 1
//! element m3: gain 1
//! tree series(m1, parallel(m2, m3))
//! drive const 3
//! ```
//!
//! Elements are impedances: `series` sums them and `parallel(x, y, …)` is
//! `(x⁻¹ + y⁻¹ + …)⁻¹`. In a `mixed` topology, `b` names the anti-monotone
//! path, so the problem's monotone `B` is the negation of that element.
//! Several `alpha` entries give per-level step sizes, innermost first.
//! Names are not reserved; `series` and `parallel` are only treated as
//! keywords when followed by `(`.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::path::Path;

use crate::circuit::CircuitTree;
use crate::error::{Error, Result};
use crate::mixed::MixedProblem;
use crate::operators::{Monotonicity, OperatorSpec, TransferFunction};
use crate::signal::{load_csv, Signal};
use crate::splitting::SolverConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct Space {
    pub n_samples: usize,
    pub period: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverDecl {
    pub alphas: Vec<f64>,
    pub eps: f64,
    pub max_iter: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ElementKind {
    Gain(f64),
    /// `v ↦ μv³/3`
    Cubic(f64),
    Tf {
        num: Vec<f64>,
        den: Vec<f64>,
    },
    Neg(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub name: String,
    pub kind: ElementKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeExpr {
    Name(String),
    Series(Vec<TreeExpr>),
    Parallel(Vec<TreeExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Topology {
    Tree(TreeExpr),
    Mixed { a1: String, a2: String, b: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DriveSpec {
    Zero,
    Const(f64),
    /// `amplitude · sin(2π·frequency·t)`
    Sin {
        amplitude: f64,
        frequency: f64,
    },
    /// Path of a `t,v` file, relative to the netlist's directory.
    Csv(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetlistDocument {
    pub space: Space,
    pub solver: SolverDecl,
    pub elements: Vec<Element>,
    pub topology: Topology,
    pub drive: DriveSpec,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DiagnosticKind {
    #[error("expected {}, found {found}", expected.join(" or "))]
    Syntax { expected: Vec<String>, found: String },
    #[error("undefined element `{0}`")]
    UndefinedName(String),
    #[error("element `{0}` is defined more than once")]
    DuplicateName(String),
    #[error("{construct} needs at least two operands, found {found}")]
    Arity { construct: String, found: usize },
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("element `{0}` negates itself through a cycle")]
    NegCycle(String),
}

/// A problem in netlist text, with a 1-based line and column.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{line}:{column}: {kind}")]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub kind: DiagnosticKind,
}

/// Where in a document a semantic problem sits. References and composite
/// tree nodes are numbered in document order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Site {
    SpaceN,
    SpaceT,
    Alpha(usize),
    Eps,
    MaxIter,
    Element(usize),
    Ref(usize),
    Composite(usize),
    Drive,
}

fn invalid(site: Site, msg: String) -> (Site, DiagnosticKind) {
    (site, DiagnosticKind::InvalidValue(msg))
}

impl NetlistDocument {
    /// Checks everything the grammar cannot: values in range, names
    /// defined once, references resolved, no negation cycles.
    pub fn validate(&self) -> std::result::Result<(), DiagnosticKind> {
        self.check().map_err(|(_, kind)| kind)
    }

    fn check(&self) -> std::result::Result<(), (Site, DiagnosticKind)> {
        if self.space.n_samples < 1 {
            return Err(invalid(Site::SpaceN, "N must be at least 1".into()));
        }
        if !(self.space.period.is_finite() && self.space.period > 0.0) {
            return Err(invalid(
                Site::SpaceT,
                format!("T must be positive, got {}", self.space.period),
            ));
        }
        if self.solver.alphas.is_empty() {
            return Err(invalid(Site::Alpha(0), "at least one alpha is required".into()));
        }
        for (k, a) in self.solver.alphas.iter().enumerate() {
            if !(a.is_finite() && *a > 0.0) {
                return Err(invalid(Site::Alpha(k), format!("alpha must be positive, got {a}")));
            }
        }
        if !(self.solver.eps.is_finite() && self.solver.eps > 0.0) {
            return Err(invalid(
                Site::Eps,
                format!("eps must be positive, got {}", self.solver.eps),
            ));
        }
        if self.solver.max_iter < 1 {
            return Err(invalid(Site::MaxIter, "maxiter must be at least 1".into()));
        }
        if self.elements.is_empty() {
            return Err((
                Site::Element(0),
                DiagnosticKind::Syntax {
                    expected: vec!["element".into()],
                    found: "no elements".into(),
                },
            ));
        }

        let mut defined = HashSet::new();
        for (k, e) in self.elements.iter().enumerate() {
            if !defined.insert(e.name.as_str()) {
                return Err((Site::Element(k), DiagnosticKind::DuplicateName(e.name.clone())));
            }
            if !is_name(&e.name) {
                return Err(invalid(Site::Element(k), format!("`{}` is not a valid name", e.name)));
            }
            match &e.kind {
                ElementKind::Gain(v) | ElementKind::Cubic(v) if !v.is_finite() => {
                    return Err(invalid(Site::Element(k), format!("non-finite parameter {v}")));
                }
                ElementKind::Tf { num, den } => {
                    TransferFunction::new(num.clone(), den.clone())
                        .map_err(|err| (Site::Element(k), DiagnosticKind::InvalidValue(err.to_string())))?;
                }
                _ => {}
            }
        }

        for (k, name) in self.references().into_iter().enumerate() {
            if !defined.contains(name) {
                return Err((Site::Ref(k), DiagnosticKind::UndefinedName(name.to_string())));
            }
        }
        for (k, e) in self.elements.iter().enumerate() {
            if self.resolve_chain(&e.name).is_none() {
                return Err((Site::Element(k), DiagnosticKind::NegCycle(e.name.clone())));
            }
        }
        if let Topology::Tree(expr) = &self.topology {
            let mut counter = 0;
            check_arity(expr, &mut counter)?;
        }
        if let DriveSpec::Const(v) | DriveSpec::Sin { amplitude: v, .. } = &self.drive {
            if !v.is_finite() {
                return Err(invalid(Site::Drive, format!("non-finite drive value {v}")));
            }
        }
        if let DriveSpec::Sin { frequency, .. } = &self.drive {
            if !frequency.is_finite() {
                return Err(invalid(Site::Drive, format!("non-finite frequency {frequency}")));
            }
        }
        if let DriveSpec::Csv(path) = &self.drive {
            if path.is_empty() {
                return Err(invalid(Site::Drive, "empty csv path".into()));
            }
        }
        Ok(())
    }

    /// Names referenced by `neg` elements, then by the topology, in order.
    fn references(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .elements
            .iter()
            .filter_map(|e| match &e.kind {
                ElementKind::Neg(n) => Some(n.as_str()),
                _ => None,
            })
            .collect();
        match &self.topology {
            Topology::Tree(expr) => collect_names(expr, &mut out),
            Topology::Mixed { a1, a2, b } => out.extend([a1.as_str(), a2.as_str(), b.as_str()]),
        }
        out
    }

    fn find(&self, name: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.name == name)
    }

    /// Follows `neg` links from `name`; returns the terminal element and
    /// the number of negations, or `None` on a cycle or undefined name.
    fn resolve_chain(&self, name: &str) -> Option<(&Element, usize)> {
        let mut current = self.find(name)?;
        let mut negations = 0;
        while let ElementKind::Neg(target) = &current.kind {
            negations += 1;
            if negations > self.elements.len() {
                return None;
            }
            current = self.find(target)?;
        }
        Some((current, negations))
    }

    /// The operator an element name denotes.
    pub fn operator(&self, name: &str) -> Result<OperatorSpec> {
        let (terminal, negations) = self
            .resolve_chain(name)
            .ok_or_else(|| Error::InvalidConfig(format!("cannot resolve element `{name}`")))?;
        let mut op = match &terminal.kind {
            ElementKind::Gain(g) => OperatorSpec::Gain(*g),
            ElementKind::Cubic(c) => OperatorSpec::cubic(*c),
            ElementKind::Tf { num, den } => OperatorSpec::tf(num.clone(), den.clone())?,
            ElementKind::Neg(_) => unreachable!("resolve_chain stops at a non-negation"),
        };
        for _ in 0..negations {
            op = op.negated();
        }
        Ok(op)
    }

    pub fn solver_config(&self) -> SolverConfig {
        let alphas = &self.solver.alphas;
        let cfg = SolverConfig::new(*alphas.last().unwrap_or(&1.0), self.solver.eps, self.solver.max_iter);
        if alphas.len() > 1 {
            cfg.with_level_alphas(alphas.clone())
        } else {
            cfg
        }
    }

    /// The drive signal; CSV paths are resolved against `base_dir`.
    pub fn drive_signal(&self, base_dir: &Path) -> Result<Signal> {
        let Space { n_samples: n, period } = self.space;
        match &self.drive {
            DriveSpec::Zero => Signal::zeros(n, period),
            DriveSpec::Const(c) => Signal::constant(n, period, *c),
            DriveSpec::Sin { amplitude, frequency } => Signal::from_fn(n, period, |t| {
                amplitude * (2.0 * std::f64::consts::PI * frequency * t).sin()
            }),
            DriveSpec::Csv(path) => {
                let s = load_csv(base_dir.join(path))?;
                if s.len() != n || (s.period() - period).abs() > 1e-9 * period {
                    return Err(Error::InvalidSignal(format!(
                        "drive file {path} has N={} T={}, netlist space is N={n} T={period}",
                        s.len(),
                        s.period()
                    )));
                }
                Signal::new(s.into_samples(), period)
            }
        }
    }

    pub fn tree(&self) -> Result<Option<CircuitTree>> {
        match &self.topology {
            Topology::Tree(expr) => Ok(Some(self.build_tree(expr)?)),
            Topology::Mixed { .. } => Ok(None),
        }
    }

    fn build_tree(&self, expr: &TreeExpr) -> Result<CircuitTree> {
        Ok(match expr {
            TreeExpr::Name(n) => CircuitTree::leaf(self.operator(n)?),
            TreeExpr::Series(items) => {
                CircuitTree::sum(items.iter().map(|e| self.build_tree(e)).collect::<Result<_>>()?)
            }
            TreeExpr::Parallel(items) => {
                let admittances = items
                    .iter()
                    .map(|e| Ok(invert(self.build_tree(e)?)))
                    .collect::<Result<_>>()?;
                invert(CircuitTree::sum(admittances))
            }
        })
    }

    /// Builds the solvable problem. CSV drives are read relative to
    /// `base_dir`.
    pub fn build(&self, base_dir: &Path) -> Result<Problem> {
        self.validate().map_err(|k| Error::InvalidConfig(k.to_string()))?;
        let drive = self.drive_signal(base_dir)?;
        let config = self.solver_config();
        match &self.topology {
            Topology::Tree(expr) => {
                let tree = self.build_tree(expr)?;
                tree.validate()?;
                Ok(Problem::Tree { tree, drive, config })
            }
            Topology::Mixed { a1, a2, b } => {
                let path = self.operator(b)?;
                if path.declared() != Monotonicity::AntiMonotone {
                    return Err(Error::NotMonotone(format!(
                        "b = `{b}` must name the anti-monotone path (its negation is the monotone B)"
                    )));
                }
                let problem = MixedProblem::new(self.operator(a1)?, self.operator(a2)?, path.negated(), drive)?;
                Ok(Problem::Mixed { problem, config })
            }
        }
    }

    /// Sign each element is expected to have given its role in the
    /// topology, propagated through `neg`. Unused elements are omitted; an
    /// element used with both signs appears twice.
    pub fn expected_signs(&self) -> Vec<(String, Monotonicity)> {
        let mut roots: Vec<(&str, Monotonicity)> = Vec::new();
        match &self.topology {
            Topology::Tree(expr) => {
                let mut names = Vec::new();
                collect_names(expr, &mut names);
                roots.extend(names.into_iter().map(|n| (n, Monotonicity::Monotone)));
            }
            Topology::Mixed { a1, a2, b } => roots.extend([
                (a1.as_str(), Monotonicity::Monotone),
                (a2.as_str(), Monotonicity::Monotone),
                (b.as_str(), Monotonicity::AntiMonotone),
            ]),
        }
        let mut out: Vec<(String, Monotonicity)> = Vec::new();
        for (mut name, mut sign) in roots {
            for _ in 0..=self.elements.len() {
                if !out.iter().any(|(n, s)| n == name && *s == sign) {
                    out.push((name.to_string(), sign));
                }
                match self.find(name).map(|e| &e.kind) {
                    Some(ElementKind::Neg(target)) => {
                        name = target;
                        sign = sign.flip();
                    }
                    _ => break,
                }
            }
        }
        out
    }
}

/// Problem ready for a solver.
#[derive(Clone, Debug)]
pub enum Problem {
    Tree {
        tree: CircuitTree,
        drive: Signal,
        config: SolverConfig,
    },
    Mixed {
        problem: MixedProblem,
        config: SolverConfig,
    },
}

/// Inverse with the algebraic simplifications `g⁻¹ = 1/g` (for `g ≠ 0`)
/// and `(x⁻¹)⁻¹ = x`.
fn invert(t: CircuitTree) -> CircuitTree {
    match t {
        CircuitTree::Leaf(OperatorSpec::Gain(g)) if g != 0.0 => CircuitTree::Leaf(OperatorSpec::Gain(1.0 / g)),
        CircuitTree::Inverse(inner) => *inner,
        other => other.inverse(),
    }
}

fn collect_names<'a>(expr: &'a TreeExpr, out: &mut Vec<&'a str>) {
    match expr {
        TreeExpr::Name(n) => out.push(n),
        TreeExpr::Series(items) | TreeExpr::Parallel(items) => items.iter().for_each(|e| collect_names(e, out)),
    }
}

fn check_arity(expr: &TreeExpr, counter: &mut usize) -> std::result::Result<(), (Site, DiagnosticKind)> {
    let (construct, items) = match expr {
        TreeExpr::Name(_) => return Ok(()),
        TreeExpr::Series(items) => ("series", items),
        TreeExpr::Parallel(items) => ("parallel", items),
    };
    let site = Site::Composite(*counter);
    *counter += 1;
    if items.len() < 2 {
        return Err((
            site,
            DiagnosticKind::Arity {
                construct: construct.into(),
                found: items.len(),
            },
        ));
    }
    items.iter().try_for_each(|e| check_arity(e, counter))
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

// Printing.

fn num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x}")
    } else {
        format!("{x:?}")
    }
}

fn num_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

fn bare_path_ok(p: &str) -> bool {
    !p.is_empty() && !p.starts_with('"') && !p.chars().any(|c| c.is_whitespace() || c == '#')
}

fn write_tree(expr: &TreeExpr, out: &mut String) {
    match expr {
        TreeExpr::Name(n) => out.push_str(n),
        TreeExpr::Series(items) | TreeExpr::Parallel(items) => {
            out.push_str(if matches!(expr, TreeExpr::Series(_)) {
                "series("
            } else {
                "parallel("
            });
            for (k, e) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_tree(e, out);
            }
            out.push(')');
        }
    }
}

impl fmt::Display for NetlistDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "space N={} T={}", self.space.n_samples, num(self.space.period));
        out.push_str("solver");
        for a in &self.solver.alphas {
            let _ = write!(out, " alpha={}", num(*a));
        }
        let _ = writeln!(out, " eps={} maxiter={}", num(self.solver.eps), self.solver.max_iter);
        for e in &self.elements {
            let kind = match &e.kind {
                ElementKind::Gain(g) => format!("gain {}", num(*g)),
                ElementKind::Cubic(c) => format!("cubic {}", num(*c)),
                ElementKind::Tf { num: n, den } => format!("tf num={} den={}", num_list(n), num_list(den)),
                ElementKind::Neg(target) => format!("neg {target}"),
            };
            let _ = writeln!(out, "element {}: {kind}", e.name);
        }
        match &self.topology {
            Topology::Tree(expr) => {
                out.push_str("tree ");
                write_tree(expr, &mut out);
                out.push('\n');
            }
            Topology::Mixed { a1, a2, b } => {
                let _ = writeln!(out, "mixed a1={a1} a2={a2} b={b}");
            }
        }
        match &self.drive {
            DriveSpec::Zero => out.push_str("drive zero\n"),
            DriveSpec::Const(c) => {
                let _ = writeln!(out, "drive const {}", num(*c));
            }
            DriveSpec::Sin { amplitude, frequency } => {
                let _ = writeln!(out, "drive sin {} {}", num(*amplitude), num(*frequency));
            }
            DriveSpec::Csv(p) if bare_path_ok(p) => {
                let _ = writeln!(out, "drive csv {p}");
            }
            DriveSpec::Csv(p) => {
                let escaped = p.replace('\\', "\\\\").replace('"', "\\\"");
                let _ = writeln!(out, "drive csv \"{escaped}\"");
            }
        }
        f.write_str(&out)
    }
}

/// Canonical text of a document.
pub fn print(doc: &NetlistDocument) -> String {
    doc.to_string()
}

// Parsing.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

struct Parser<'a> {
    src: &'a str,
    offset: usize,
    line: usize,
    column: usize,
    sites: HashMap<Site, Pos>,
    refs: usize,
    composites: usize,
}

type PResult<T> = std::result::Result<T, Diagnostic>;

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_number_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '.' | '+' | '-' | '_')
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            offset: 0,
            line: 1,
            column: 1,
            sites: HashMap::new(),
            refs: 0,
            composites: 0,
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.offset..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while !matches!(self.peek(), None | Some('\n')) {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn error_at(&self, pos: Pos, kind: DiagnosticKind) -> Diagnostic {
        Diagnostic {
            line: pos.line,
            column: pos.column,
            kind,
        }
    }

    /// Description of the upcoming token, for diagnostics.
    fn found(&self) -> String {
        let rest = self.rest();
        if rest.is_empty() {
            return "end of input".into();
        }
        let first = rest.chars().next().unwrap();
        let token: String = if is_number_char(first) {
            rest.chars().take_while(|&c| is_number_char(c)).take(24).collect()
        } else {
            first.to_string()
        };
        format!("`{token}`")
    }

    fn expected<T>(&mut self, expected: &[&str]) -> PResult<T> {
        self.skip_trivia();
        Err(self.error_at(
            self.pos(),
            DiagnosticKind::Syntax {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found: self.found(),
            },
        ))
    }

    fn peek_word(&mut self) -> Option<&'a str> {
        self.skip_trivia();
        let rest = self.rest();
        let first = rest.chars().next()?;
        if !(first.is_ascii_alphabetic() || first == '_') {
            return None;
        }
        let end = rest.find(|c: char| !is_word_char(c)).unwrap_or(rest.len());
        Some(&rest[..end])
    }

    fn word(&mut self, what: &str) -> PResult<(String, Pos)> {
        match self.peek_word() {
            Some(w) => {
                let pos = self.pos();
                for _ in 0..w.len() {
                    self.bump();
                }
                Ok((w.to_string(), pos))
            }
            None => self.expected(&[what]),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Pos> {
        match self.peek_word() {
            Some(w) if w == kw => Ok(self.word(kw)?.1),
            _ => self.expected(&[&format!("`{kw}`")]),
        }
    }

    fn punct(&mut self, c: char) -> PResult<()> {
        self.skip_trivia();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            self.expected(&[&format!("`{c}`")])
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        self.skip_trivia();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn raw_number(&mut self) -> (String, Pos) {
        self.skip_trivia();
        let pos = self.pos();
        let rest = self.rest();
        let end = rest.find(|c: char| !is_number_char(c)).unwrap_or(rest.len());
        (rest[..end].to_string(), pos)
    }

    fn advance(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn float(&mut self) -> PResult<(f64, Pos)> {
        let (text, pos) = self.raw_number();
        match text.parse::<f64>() {
            Ok(v) if !text.is_empty() && text.starts_with(|c: char| c.is_ascii_digit() || "+-.".contains(c)) => {
                self.advance(text.chars().count());
                Ok((v, pos))
            }
            _ => self.expected(&["number"]),
        }
    }

    fn integer(&mut self) -> PResult<(usize, Pos)> {
        let (text, pos) = self.raw_number();
        match text.parse::<usize>() {
            Ok(v) => {
                self.advance(text.chars().count());
                Ok((v, pos))
            }
            Err(_) => self.expected(&["integer"]),
        }
    }

    fn assignment_float(&mut self, key: &str) -> PResult<(f64, Pos)> {
        self.keyword(key)?;
        self.punct('=')?;
        self.float()
    }

    fn float_list(&mut self) -> PResult<Vec<f64>> {
        let mut out = vec![self.float()?.0];
        while self.eat_punct(',') {
            out.push(self.float()?.0);
        }
        Ok(out)
    }

    fn reference(&mut self) -> PResult<String> {
        let (name, pos) = self.word("element name")?;
        self.sites.insert(Site::Ref(self.refs), pos);
        self.refs += 1;
        Ok(name)
    }

    fn document(&mut self) -> PResult<NetlistDocument> {
        self.keyword("space")?;
        self.keyword("N")?;
        self.punct('=')?;
        let (n_samples, pos) = self.integer()?;
        self.sites.insert(Site::SpaceN, pos);
        let (period, pos) = self.assignment_float("T")?;
        self.sites.insert(Site::SpaceT, pos);

        self.keyword("solver")?;
        let mut alphas = Vec::new();
        let (a, pos) = self.assignment_float("alpha")?;
        alphas.push(a);
        self.sites.insert(Site::Alpha(0), pos);
        while self.peek_word() == Some("alpha") {
            let (a, pos) = self.assignment_float("alpha")?;
            self.sites.insert(Site::Alpha(alphas.len()), pos);
            alphas.push(a);
        }
        let (eps, pos) = self.assignment_float("eps")?;
        self.sites.insert(Site::Eps, pos);
        self.keyword("maxiter")?;
        self.punct('=')?;
        let (max_iter, pos) = self.integer()?;
        self.sites.insert(Site::MaxIter, pos);

        let mut elements = Vec::new();
        // Negation targets are recorded first so that reference numbering
        // matches `NetlistDocument::references`.
        let mut neg_refs = Vec::new();
        self.keyword("element")?;
        loop {
            let (name, pos) = self.word("element name")?;
            self.sites.insert(Site::Element(elements.len()), pos);
            self.punct(':')?;
            let kind = match self.peek_word() {
                Some("gain") => {
                    self.word("gain")?;
                    ElementKind::Gain(self.float()?.0)
                }
                Some("cubic") => {
                    self.word("cubic")?;
                    ElementKind::Cubic(self.float()?.0)
                }
                Some("tf") => {
                    self.word("tf")?;
                    self.keyword("num")?;
                    self.punct('=')?;
                    let num = self.float_list()?;
                    self.keyword("den")?;
                    self.punct('=')?;
                    let den = self.float_list()?;
                    ElementKind::Tf { num, den }
                }
                Some("neg") => {
                    self.word("neg")?;
                    let (target, pos) = self.word("element name")?;
                    neg_refs.push(pos);
                    ElementKind::Neg(target)
                }
                _ => return self.expected(&["`gain`", "`cubic`", "`tf`", "`neg`"]),
            };
            elements.push(Element { name, kind });
            if self.peek_word() == Some("element") {
                self.word("element")?;
            } else {
                break;
            }
        }
        for pos in neg_refs {
            self.sites.insert(Site::Ref(self.refs), pos);
            self.refs += 1;
        }

        let topology = match self.peek_word() {
            Some("tree") => {
                self.word("tree")?;
                Topology::Tree(self.tree_expr()?)
            }
            Some("mixed") => {
                self.word("mixed")?;
                self.keyword("a1")?;
                self.punct('=')?;
                let a1 = self.reference()?;
                self.keyword("a2")?;
                self.punct('=')?;
                let a2 = self.reference()?;
                self.keyword("b")?;
                self.punct('=')?;
                let b = self.reference()?;
                Topology::Mixed { a1, a2, b }
            }
            _ => return self.expected(&["`element`", "`tree`", "`mixed`"]),
        };

        let drive_pos = self.keyword("drive")?;
        self.sites.insert(Site::Drive, drive_pos);
        let drive = match self.peek_word() {
            Some("zero") => {
                self.word("zero")?;
                DriveSpec::Zero
            }
            Some("const") => {
                self.word("const")?;
                DriveSpec::Const(self.float()?.0)
            }
            Some("sin") => {
                self.word("sin")?;
                let amplitude = self.float()?.0;
                let frequency = self.float()?.0;
                DriveSpec::Sin { amplitude, frequency }
            }
            Some("csv") => {
                self.word("csv")?;
                DriveSpec::Csv(self.path()?)
            }
            _ => return self.expected(&["`zero`", "`const`", "`sin`", "`csv`"]),
        };

        self.skip_trivia();
        if self.peek().is_some() {
            return self.expected(&["end of input"]);
        }
        Ok(NetlistDocument {
            space: Space { n_samples, period },
            solver: SolverDecl { alphas, eps, max_iter },
            elements,
            topology,
            drive,
        })
    }

    fn tree_expr(&mut self) -> PResult<TreeExpr> {
        let (name, pos) = self.word("element name or `series(` or `parallel(`")?;
        let composite = matches!(name.as_str(), "series" | "parallel") && {
            self.skip_trivia();
            self.peek() == Some('(')
        };
        if !composite {
            self.sites.insert(Site::Ref(self.refs), pos);
            self.refs += 1;
            return Ok(TreeExpr::Name(name));
        }
        self.sites.insert(Site::Composite(self.composites), pos);
        self.composites += 1;
        self.punct('(')?;
        let mut items = vec![self.tree_expr()?];
        while self.eat_punct(',') {
            items.push(self.tree_expr()?);
        }
        self.punct(')')?;
        if items.len() < 2 {
            return Err(self.error_at(
                pos,
                DiagnosticKind::Arity {
                    construct: name,
                    found: items.len(),
                },
            ));
        }
        Ok(if name == "series" {
            TreeExpr::Series(items)
        } else {
            TreeExpr::Parallel(items)
        })
    }

    fn path(&mut self) -> PResult<String> {
        self.skip_trivia();
        if self.peek() == Some('"') {
            let start = self.pos();
            self.bump();
            let mut out = String::new();
            loop {
                match self.bump() {
                    Some('"') => return Ok(out),
                    Some('\\') => match self.bump() {
                        Some(c @ ('"' | '\\')) => out.push(c),
                        _ => {
                            return Err(self.error_at(
                                start,
                                DiagnosticKind::Syntax {
                                    expected: vec!["`\\\"` or `\\\\` escape".into()],
                                    found: "invalid escape".into(),
                                },
                            ))
                        }
                    },
                    Some(c) => out.push(c),
                    None => {
                        return Err(self.error_at(
                            start,
                            DiagnosticKind::Syntax {
                                expected: vec!["closing `\"`".into()],
                                found: "end of input".into(),
                            },
                        ))
                    }
                }
            }
        }
        let rest = self.rest();
        let end = rest.find(|c: char| c.is_whitespace() || c == '#').unwrap_or(rest.len());
        if end == 0 {
            return self.expected(&["path"]);
        }
        let path = rest[..end].to_string();
        self.advance(path.chars().count());
        Ok(path)
    }
}

/// Parses `.msn` text. Every error carries the position it refers to.
pub fn parse(text: &str) -> std::result::Result<NetlistDocument, Diagnostic> {
    let mut parser = Parser::new(text);
    let doc = parser.document()?;
    doc.check().map_err(|(site, kind)| {
        let pos = parser.sites.get(&site).copied().unwrap_or(Pos { line: 1, column: 1 });
        parser.error_at(pos, kind)
    })?;
    Ok(doc)
}
