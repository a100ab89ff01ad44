//! Series/parallel one-ports as trees of relation sums and inverses.
//!
//! A port relation `drive ∈ M(x)` is solved by viewing it as forward
//! evaluation of `M⁻¹` at the drive. Each [`CircuitTree::Inverse`] node
//! carries an auxiliary port variable that tracks its own inverse problem;
//! a sum node is advanced by one forward/backward step in which a designated
//! child supplies the resolvent and every other child is evaluated forward.
//!
//! [`solve_nested`] advances every auxiliary variable by a single step per
//! sweep, innermost first. [`solve_naive`] instead solves every inner
//! inverse problem to completion before each outer step; it is much slower
//! and serves as a reference.
//!
//! For `M1 + (M2 + M3)⁻¹` driven by a voltage `v*`, one nested sweep is
//!
//! ```text
//! v ← res_{α1 M2}(v - α1·M3(v) + α1·i)
//! i ← res_{α2 M1}(i - α2·v + α2·v*)
//! ```

use crate::error::{Error, Result};
use crate::operators::{Monotonicity, OperatorSpec};
use crate::signal::{norm, Signal};
use crate::splitting::{iterate, SolveResult, SolverConfig};

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitTree {
    Leaf(OperatorSpec),
    /// Relation sum. `backward` designates the child that supplies the
    /// resolvent step; by default the first leaf, or inverse of a leaf.
    Sum {
        children: Vec<CircuitTree>,
        backward: Option<usize>,
    },
    Inverse(Box<CircuitTree>),
}

impl CircuitTree {
    pub fn leaf(op: OperatorSpec) -> Self {
        CircuitTree::Leaf(op)
    }

    pub fn sum(children: Vec<CircuitTree>) -> Self {
        CircuitTree::Sum {
            children,
            backward: None,
        }
    }

    pub fn sum_with_backward(children: Vec<CircuitTree>, backward: usize) -> Self {
        CircuitTree::Sum {
            children,
            backward: Some(backward),
        }
    }

    pub fn inverse(self) -> Self {
        CircuitTree::Inverse(Box::new(self))
    }

    /// Parallel interconnection of impedances: `(Σ childᵢ⁻¹)⁻¹`.
    pub fn parallel(children: Vec<CircuitTree>) -> Self {
        CircuitTree::sum(children.into_iter().map(CircuitTree::inverse).collect()).inverse()
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CircuitTree::Leaf(op) => match op.declared() {
                Monotonicity::Monotone => Ok(()),
                other => Err(Error::NotMonotone(format!("circuit leaf {op:?} is declared {other:?}"))),
            },
            CircuitTree::Sum { children, backward } => {
                if children.len() < 2 {
                    return Err(Error::InvalidConfig(format!(
                        "sum node needs at least two children, got {}",
                        children.len()
                    )));
                }
                if let Some(b) = backward {
                    if *b >= children.len() {
                        return Err(Error::InvalidConfig(format!(
                            "backward child {b} out of range for {} children",
                            children.len()
                        )));
                    }
                }
                children.iter().try_for_each(CircuitTree::validate)
            }
            CircuitTree::Inverse(child) => child.validate(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            CircuitTree::Leaf(_) => 1,
            CircuitTree::Sum { children, .. } => 1 + children.iter().map(Self::depth).max().unwrap_or(0),
            CircuitTree::Inverse(child) => 1 + child.depth(),
        }
    }

    pub fn leaves(&self) -> Vec<&OperatorSpec> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a OperatorSpec>) {
        match self {
            CircuitTree::Leaf(op) => out.push(op),
            CircuitTree::Sum { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
            CircuitTree::Inverse(child) => child.collect_leaves(out),
        }
    }
}

/// Scalar gain of a tree whose leaves are all positive gains.
pub fn effective_relation_linear(tree: &CircuitTree) -> Result<f64> {
    match tree {
        CircuitTree::Leaf(OperatorSpec::Gain(g)) => Ok(*g),
        CircuitTree::Leaf(op) => Err(Error::NotLinear(format!("{op:?} is not a gain"))),
        CircuitTree::Sum { children, .. } => children.iter().map(effective_relation_linear).sum(),
        CircuitTree::Inverse(child) => {
            let g = effective_relation_linear(child)?;
            if g == 0.0 {
                Err(Error::ZeroDivision)
            } else {
                Ok(1.0 / g)
            }
        }
    }
}

// Compiled form: nested sums flattened, double inverses removed, one state
// slot per inverse node.

#[derive(Debug)]
struct InverseNode {
    slot: usize,
    /// Number of nested inverse levels below this one.
    level: usize,
    body: Body,
}

#[derive(Debug)]
enum Body {
    /// Inverse of a leaf: proximal-point step.
    Leaf(OperatorSpec),
    /// Inverse of an inverse: plain forward evaluation of the terms.
    Forward(Vec<Forward>),
    /// Inverse of a sum: one forward/backward step.
    Sum { backward: Backward, forward: Vec<Forward> },
}

#[derive(Debug)]
enum Backward {
    Leaf(OperatorSpec),
    /// Resolvent of `L⁻¹` via `z - α·res_{L/α}(z/α)`.
    InverseLeaf(OperatorSpec),
}

#[derive(Debug)]
enum Forward {
    Leaf(OperatorSpec),
    Inverse(InverseNode),
}

fn strip_double_inverse(mut t: &CircuitTree) -> &CircuitTree {
    while let CircuitTree::Inverse(inner) = t {
        match inner.as_ref() {
            CircuitTree::Inverse(x) => t = x,
            _ => break,
        }
    }
    t
}

fn cheap_backward(t: &CircuitTree) -> Option<Backward> {
    match strip_double_inverse(t) {
        CircuitTree::Leaf(op) => Some(Backward::Leaf(op.clone())),
        CircuitTree::Inverse(inner) => match strip_double_inverse(inner) {
            CircuitTree::Leaf(op) => Some(Backward::InverseLeaf(op.clone())),
            _ => None,
        },
        CircuitTree::Sum { .. } => None,
    }
}

struct Compiler {
    slots: usize,
}

impl Compiler {
    /// Appends the forward-evaluated terms of `t` to `out`, returning the
    /// deepest inverse level created (or `None`).
    fn forward_terms(&mut self, t: &CircuitTree, out: &mut Vec<Forward>) -> Result<Option<usize>> {
        match strip_double_inverse(t) {
            CircuitTree::Leaf(op) => {
                out.push(Forward::Leaf(op.clone()));
                Ok(None)
            }
            CircuitTree::Sum { children, .. } => {
                let mut level = None;
                for c in children {
                    level = level.max(self.forward_terms(c, out)?);
                }
                Ok(level)
            }
            CircuitTree::Inverse(inner) => {
                let node = self.inverse(inner)?;
                let level = node.level;
                out.push(Forward::Inverse(node));
                Ok(Some(level))
            }
        }
    }

    /// Compiles the inverse of `t`.
    fn inverse(&mut self, t: &CircuitTree) -> Result<InverseNode> {
        let (body, below) = match t {
            CircuitTree::Leaf(op) => (Body::Leaf(op.clone()), None),
            CircuitTree::Inverse(inner) => {
                let mut forward = Vec::new();
                let below = self.forward_terms(inner, &mut forward)?;
                (Body::Forward(forward), below)
            }
            CircuitTree::Sum { children, backward } => {
                let index = match backward {
                    Some(b) => *b,
                    None => children
                        .iter()
                        .position(|c| cheap_backward(c).is_some())
                        .ok_or(Error::NoBackwardChild)?,
                };
                let chosen = children
                    .get(index)
                    .and_then(cheap_backward)
                    .ok_or(Error::NoBackwardChild)?;
                let mut forward = Vec::new();
                let mut below = None;
                for (k, c) in children.iter().enumerate() {
                    if k != index {
                        below = below.max(self.forward_terms(c, &mut forward)?);
                    }
                }
                (
                    Body::Sum {
                        backward: chosen,
                        forward,
                    },
                    below,
                )
            }
        };
        let slot = self.slots;
        self.slots += 1;
        Ok(InverseNode {
            slot,
            level: below.map_or(0, |l| l + 1),
            body,
        })
    }
}

struct Engine<'a> {
    cfg: &'a SolverConfig,
    states: Vec<Signal>,
    evaluations: usize,
    naive: bool,
    /// Largest state change in the current sweep.
    sweep_change: f64,
}

impl Engine<'_> {
    fn resolvent(&mut self, op: &OperatorSpec, alpha: f64, z: &Signal) -> Result<Signal> {
        self.evaluations += 1;
        op.resolvent(alpha, z)
    }

    fn backward(&mut self, b: &Backward, alpha: f64, z: &Signal) -> Result<Signal> {
        match b {
            Backward::Leaf(op) => self.resolvent(op, alpha, z),
            Backward::InverseLeaf(op) => {
                let r = self.resolvent(op, 1.0 / alpha, &z.scale(1.0 / alpha))?;
                Ok(z.add_scaled(-alpha, &r))
            }
        }
    }

    fn forward(&mut self, f: &Forward, u: &Signal) -> Result<Signal> {
        match f {
            Forward::Leaf(op) => op.apply(u),
            Forward::Inverse(node) => {
                if self.naive {
                    self.solve_inner(node, u)?;
                } else {
                    self.step(node, u)?;
                }
                Ok(self.states[node.slot].clone())
            }
        }
    }

    fn forward_sum(&mut self, terms: &[Forward], u: &Signal) -> Result<Signal> {
        let mut acc = u.filled(0.0);
        for f in terms {
            acc = acc.add(&self.forward(f, u)?);
        }
        Ok(acc)
    }

    /// One step on the inverse problem `u ∈ body(a)` of `node`. Returns the
    /// change in `a`.
    fn step(&mut self, node: &InverseNode, u: &Signal) -> Result<f64> {
        let alpha = self.cfg.level_alpha(node.level);
        let a = self.states[node.slot].clone();
        let next = match &node.body {
            Body::Leaf(op) => self.resolvent(op, alpha, &a.add_scaled(alpha, u))?,
            Body::Forward(terms) => self.forward_sum(terms, u)?,
            Body::Sum { backward, forward } => {
                let pushed = self.forward_sum(forward, &a)?;
                let arg = a.add_scaled(-alpha, &pushed).add_scaled(alpha, u);
                self.backward(backward, alpha, &arg)?
            }
        };
        next.check_same_space(&a)?;
        let d = self.cfg.distance(&next, &a);
        self.sweep_change = self.sweep_change.max(d);
        self.states[node.slot] = next;
        Ok(d)
    }

    /// Steps `node` until its own change drops to `epsilon / 10`.
    fn solve_inner(&mut self, node: &InverseNode, u: &Signal) -> Result<()> {
        let tol = self.cfg.epsilon / 10.0;
        for iteration in 1..=self.cfg.max_iter {
            let d = self.step(node, u)?;
            if !d.is_finite() {
                return Err(Error::NonFinite { iteration });
            }
            if d <= tol {
                return Ok(());
            }
        }
        Err(Error::InnerSolveFailed {
            max_iter: self.cfg.max_iter,
        })
    }

    /// Largest residual over the equations of `node` and everything below
    /// it, for input `u`.
    fn residual(&self, node: &InverseNode, u: &Signal) -> Option<f64> {
        let a = &self.states[node.slot];
        let mut worst = 0.0f64;
        let r = match &node.body {
            Body::Leaf(op) => norm(&op.apply(a).ok()?.sub(u)),
            Body::Forward(terms) => norm(&self.forward_value(terms, u, &mut worst)?.sub(a)),
            Body::Sum { backward, forward } => {
                let pushed = self.forward_value(forward, a, &mut worst)?;
                match backward {
                    Backward::Leaf(op) => norm(&op.apply(a).ok()?.add(&pushed).sub(u)),
                    Backward::InverseLeaf(op) => norm(&op.apply(&u.sub(&pushed)).ok()?.sub(a)),
                }
            }
        };
        Some(worst.max(r))
    }

    fn forward_value(&self, terms: &[Forward], u: &Signal, worst: &mut f64) -> Option<Signal> {
        let mut acc = u.filled(0.0);
        for f in terms {
            let value = match f {
                Forward::Leaf(op) => op.apply(u).ok()?,
                Forward::Inverse(node) => {
                    *worst = worst.max(self.residual(node, u)?);
                    self.states[node.slot].clone()
                }
            };
            acc = acc.add(&value);
        }
        Some(acc)
    }
}

fn solve(tree: &CircuitTree, drive: &Signal, cfg: &SolverConfig, naive: bool) -> Result<SolveResult> {
    cfg.validate()?;
    tree.validate()?;
    let mut compiler = Compiler { slots: 0 };
    let root = compiler.inverse(tree)?;
    let mut states = vec![drive.filled(0.0); compiler.slots];
    states[root.slot] = cfg.initial(drive)?;
    let mut engine = Engine {
        cfg,
        states,
        evaluations: 0,
        naive,
        sweep_change: 0.0,
    };
    let trace = iterate(cfg, |_| {
        engine.sweep_change = 0.0;
        engine.step(&root, drive)?;
        Ok(engine.sweep_change)
    })?;
    let fixed_point_residual = engine.residual(&root, drive);
    let mut states = engine.states;
    let solution = states.remove(root.slot);
    Ok(SolveResult {
        solution,
        auxiliary: states,
        iterations: trace.residuals.len(),
        residuals: trace.residuals,
        converged: trace.converged,
        fixed_point_residual,
        resolvent_evaluations: engine.evaluations,
    })
}

/// Solves `drive ∈ tree(x)` with one interleaved forward/backward step per
/// inverse node per sweep.
///
/// `auxiliary` holds the final inverse-node variables, innermost first.
/// Step sizes come from [`SolverConfig::level_alpha`], where level 0 is an
/// inverse node with no inverse below it and the root is the outermost
/// level. The stopping test uses the largest change over all state
/// variables in a sweep, and `fixed_point_residual` is the largest residual
/// over all node equations.
pub fn solve_nested(tree: &CircuitTree, drive: &Signal, cfg: &SolverConfig) -> Result<SolveResult> {
    solve(tree, drive, cfg, false)
}

/// Like [`solve_nested`], but each inner inverse problem is solved to
/// `epsilon / 10` (warm-started from its previous solution) before every
/// outer step.
pub fn solve_naive(tree: &CircuitTree, drive: &Signal, cfg: &SolverConfig) -> Result<SolveResult> {
    solve(tree, drive, cfg, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gain(g: f64) -> CircuitTree {
        CircuitTree::leaf(OperatorSpec::Gain(g))
    }

    fn series_parallel(m1: OperatorSpec, m2: OperatorSpec, m3: OperatorSpec) -> CircuitTree {
        CircuitTree::sum(vec![
            CircuitTree::leaf(m1),
            CircuitTree::sum(vec![CircuitTree::leaf(m2), CircuitTree::leaf(m3)]).inverse(),
        ])
    }

    fn constant(n: usize, c: f64) -> Signal {
        Signal::constant(n, 1.0, c).unwrap()
    }

    fn all_near(x: &Signal, c: f64, tol: f64) -> bool {
        x.samples().iter().all(|v| (v - c).abs() <= tol)
    }

    #[test]
    fn effective_gain_examples() {
        let t = series_parallel(
            OperatorSpec::Gain(1.0),
            OperatorSpec::Gain(1.0),
            OperatorSpec::Gain(1.0),
        );
        assert_eq!(effective_relation_linear(&t).unwrap(), 1.5);
        assert_eq!(effective_relation_linear(&gain(7.0)).unwrap(), 7.0);
        assert_eq!(effective_relation_linear(&gain(4.0).inverse()).unwrap(), 0.25);
        assert!(matches!(
            effective_relation_linear(&gain(0.0).inverse()),
            Err(Error::ZeroDivision)
        ));
        assert!(matches!(
            effective_relation_linear(&CircuitTree::leaf(OperatorSpec::cubic(1.0))),
            Err(Error::NotLinear(_))
        ));
    }

    #[test]
    fn validation() {
        assert!(CircuitTree::sum(vec![gain(1.0)]).validate().is_err());
        assert!(matches!(
            CircuitTree::leaf(OperatorSpec::Gain(1.0).negated()).validate(),
            Err(Error::NotMonotone(_))
        ));
        assert!(CircuitTree::sum_with_backward(vec![gain(1.0), gain(2.0)], 2)
            .validate()
            .is_err());
        assert_eq!(
            series_parallel(
                OperatorSpec::Gain(1.0),
                OperatorSpec::Gain(1.0),
                OperatorSpec::Gain(1.0)
            )
            .depth(),
            4
        );
    }

    #[test]
    fn fig1_linear_examples() {
        let cfg = SolverConfig::new(0.5, 1e-10, 10_000);
        let ones = series_parallel(
            OperatorSpec::Gain(1.0),
            OperatorSpec::Gain(1.0),
            OperatorSpec::Gain(1.0),
        );
        let r = solve_nested(&ones, &constant(4, 3.0), &cfg).unwrap();
        assert!(r.converged);
        assert!(all_near(&r.solution, 2.0, 1e-8));
        assert_eq!(r.auxiliary.len(), 1);
        assert!(all_near(&r.auxiliary[0], 1.0, 1e-8));

        let naive = solve_naive(&ones, &constant(4, 3.0), &cfg).unwrap();
        assert!(naive.converged && all_near(&naive.solution, 2.0, 1e-8));

        let open = series_parallel(
            OperatorSpec::Gain(1.0),
            OperatorSpec::Gain(1.0),
            OperatorSpec::Gain(0.0),
        );
        let r = solve_nested(&open, &constant(4, 4.0), &cfg).unwrap();
        assert!(r.converged && all_near(&r.solution, 2.0, 1e-8));
    }

    #[test]
    fn fig1_cubic_matches_naive() {
        let cfg = SolverConfig::new(0.5, 1e-8, 100_000);
        let t = series_parallel(
            OperatorSpec::Gain(1.0),
            OperatorSpec::cubic(3.0),
            OperatorSpec::Gain(1.0),
        );
        let drive = constant(4, 2.0);
        let nested = solve_nested(&t, &drive, &cfg).unwrap();
        let naive = solve_naive(&t, &drive, &cfg).unwrap();
        assert!(nested.converged && naive.converged);
        assert!(nested.solution.sub(&naive.solution).max_abs() < 1e-5);
        // v³ + v = i and i + v = 2.
        let v = nested.auxiliary[0].samples()[0];
        let i = nested.solution.samples()[0];
        assert!((v * v * v + v - i).abs() < 1e-6 && (i + v - 2.0).abs() < 1e-6);
    }

    #[test]
    fn fig1_reduces_to_two_line_sweep() {
        let (a1, a2) = (0.3, 0.7);
        let m1 = OperatorSpec::saturation(2.0, 1.0);
        let m2 = OperatorSpec::cubic(1.0);
        let m3 = OperatorSpec::Gain(0.5);
        let drive = Signal::from_fn(8, 2.0, |t| 1.5 * (std::f64::consts::PI * t).sin() + 0.2).unwrap();
        let sweeps = 7;
        let cfg = SolverConfig::new(1.0, 1e-300, sweeps).with_level_alphas(vec![a1, a2]);
        let r = solve_nested(&series_parallel(m1.clone(), m2.clone(), m3.clone()), &drive, &cfg).unwrap();

        let mut v = drive.filled(0.0);
        let mut i = drive.filled(0.0);
        for _ in 0..sweeps {
            let m3v = m3.apply(&v).unwrap();
            v = m2.resolvent(a1, &v.add_scaled(-a1, &m3v).add_scaled(a1, &i)).unwrap();
            i = m1.resolvent(a2, &i.add_scaled(-a2, &v).add_scaled(a2, &drive)).unwrap();
        }
        assert_eq!(r.iterations, sweeps);
        assert_eq!(r.solution, i);
        assert_eq!(r.auxiliary[0], v);
    }

    #[test]
    fn depth_one_tree_is_forward_backward() {
        let cfg = SolverConfig::new(0.2, 1e-10, 10_000);
        let t = CircuitTree::sum(vec![gain(1.0), gain(2.0)]);
        let r = solve_naive(&t, &constant(4, 3.0), &cfg).unwrap();
        assert!(r.converged && all_near(&r.solution, 1.0, 1e-8));
        assert!(r.auxiliary.is_empty());
    }

    #[test]
    fn naive_costs_more_on_three_element_tree() {
        let cfg = SolverConfig::new(0.3, 1e-8, 100_000);
        let t = series_parallel(
            OperatorSpec::Gain(1.3),
            OperatorSpec::Gain(0.7),
            OperatorSpec::Gain(1.9),
        );
        let drive = constant(16, 2.5);
        let nested = solve_nested(&t, &drive, &cfg).unwrap();
        let naive = solve_naive(&t, &drive, &cfg).unwrap();
        assert!(nested.resolvent_evaluations < naive.resolvent_evaluations);
    }

    #[test]
    fn missing_backward_child() {
        // Both children are sums after flattening only if nested inverses
        // of sums appear; neither is a leaf or inverse of a leaf.
        let inner = || CircuitTree::sum(vec![gain(1.0), gain(1.0)]).inverse();
        let t = CircuitTree::sum(vec![inner(), inner()]);
        let cfg = SolverConfig::new(0.3, 1e-6, 100);
        assert!(matches!(
            solve_nested(&t, &constant(4, 1.0), &cfg),
            Err(Error::NoBackwardChild)
        ));
    }

    #[test]
    fn inverse_leaf_backward_child() {
        // Parallel resistors 1 and 2 in series with 1: 1 + 2/3.
        let t = CircuitTree::sum(vec![gain(1.0), CircuitTree::parallel(vec![gain(1.0), gain(2.0)])]);
        let cfg = SolverConfig::new(0.3, 1e-10, 100_000);
        let r = solve_nested(&t, &constant(4, 5.0), &cfg).unwrap();
        assert!(r.converged);
        assert!(all_near(&r.solution, 5.0 / (1.0 + 2.0 / 3.0), 1e-8));
    }

    #[test]
    fn fig1_certification() {
        let cfg = SolverConfig::new(0.4, 1e-7, 100_000);
        let t = series_parallel(
            OperatorSpec::Gain(2.0),
            OperatorSpec::cubic(1.0),
            OperatorSpec::saturation(1.0, 0.5),
        );
        let drive = Signal::from_fn(32, 1.0, |t| 2.0 * (2.0 * std::f64::consts::PI * t).cos()).unwrap();
        let r = solve_nested(&t, &drive, &cfg).unwrap();
        assert!(r.converged);
        assert!(r.fixed_point_residual.unwrap() <= 10.0 * cfg.epsilon);
    }

    fn linear_tree(depth: u32) -> impl Strategy<Value = CircuitTree> {
        let leaf = (1.0..2.0f64).prop_map(gain);
        leaf.prop_recursive(depth, 12, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 2..4).prop_map(CircuitTree::sum),
                prop::collection::vec(inner, 2..4).prop_map(CircuitTree::parallel),
            ]
        })
    }

    // Keeps every forward/backward step inside its stability bound.
    fn safe_step(tree: &CircuitTree) -> f64 {
        let total: f64 = tree
            .leaves()
            .iter()
            .map(|op| match op {
                OperatorSpec::Gain(g) => *g,
                _ => unreachable!(),
            })
            .sum();
        1.0 / total
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn linear_trees_are_exact(tree in linear_tree(3), d in 0.5..3.0f64, big in any::<bool>()) {
            let n = if big { 1000 } else { 4 };
            let cfg = SolverConfig::new(safe_step(&tree), 1e-10, 200_000);
            let expected = d / effective_relation_linear(&tree).unwrap();
            match solve_nested(&tree, &constant(n, d), &cfg) {
                Ok(r) => {
                    prop_assert!(r.converged);
                    prop_assert!(all_near(&r.solution, expected, 1e-6));
                }
                Err(Error::NoBackwardChild) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        // Inverse(tree) driven by d returns the port variable tree(d).
        #[test]
        fn duality(tree in linear_tree(2), d in 0.5..3.0f64) {
            let cfg = SolverConfig::new(safe_step(&tree), 1e-10, 200_000);
            let g = effective_relation_linear(&tree).unwrap();
            if let Ok(r) = solve_nested(&tree.clone().inverse(), &constant(4, d), &cfg) {
                prop_assert!(r.converged);
                prop_assert!(all_near(&r.solution, d * g, 1e-6));
            }
        }
    }
}
