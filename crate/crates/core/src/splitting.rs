//! Two-operator splitting: forward/backward and Douglas–Rachford, plus the
//! fixed-point loop they share.
//!
//! Every driver stops when the distance between successive solution
//! iterates drops to `epsilon`. The problem residual is computed separately
//! on the final iterate and reported in [`SolveResult::fixed_point_residual`].

use crate::error::{Error, Result};
use crate::operators::OperatorSpec;
use crate::signal::{norm, Signal};

/// Norm used for the successive-iterate stopping test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StopNorm {
    /// Euclidean norm of the sample vector. This is `sqrt(N/T)` times the
    /// signal norm, so a fixed `epsilon` is stricter on finer grids.
    #[default]
    Samples,
    /// The `dt`-weighted signal norm.
    L2,
}

impl StopNorm {
    pub fn distance(self, a: &Signal, b: &Signal) -> f64 {
        let d = a.sub(b);
        match self {
            StopNorm::Samples => d.sample_norm(),
            StopNorm::L2 => norm(&d),
        }
    }
}

/// Starting point of an iteration.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Init {
    #[default]
    Zero,
    Constant(f64),
    /// `amplitude · sin(2π·harmonic·t/T)`
    Sinusoid {
        amplitude: f64,
        harmonic: u32,
    },
    Signal(Signal),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Default step size.
    pub alpha: f64,
    /// Per-level step sizes for nested solves, innermost level first. Levels
    /// beyond the end of this list use `alpha`.
    pub level_alphas: Vec<f64>,
    pub epsilon: f64,
    pub max_iter: usize,
    pub init: Init,
    pub stop_norm: StopNorm,
}

impl SolverConfig {
    pub fn new(alpha: f64, epsilon: f64, max_iter: usize) -> Self {
        SolverConfig {
            alpha,
            level_alphas: Vec::new(),
            epsilon,
            max_iter,
            init: Init::Zero,
            stop_norm: StopNorm::Samples,
        }
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_level_alphas(mut self, alphas: Vec<f64>) -> Self {
        self.level_alphas = alphas;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad_step = |a: f64| !(a.is_finite() && a > 0.0);
        if bad_step(self.alpha) || self.level_alphas.iter().any(|&a| bad_step(a)) {
            return Err(Error::InvalidConfig("step sizes must be positive and finite".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Step size for nesting level `level`, counted from the innermost.
    pub fn level_alpha(&self, level: usize) -> f64 {
        self.level_alphas.get(level).copied().unwrap_or(self.alpha)
    }

    /// Initial iterate on the grid of `like`.
    pub fn initial(&self, like: &Signal) -> Result<Signal> {
        let (n, t) = (like.len(), like.period());
        match &self.init {
            Init::Zero => Signal::zeros(n, t),
            Init::Constant(c) => Signal::constant(n, t, *c),
            Init::Sinusoid { amplitude, harmonic } => Signal::sinusoid(n, t, *amplitude, *harmonic),
            Init::Signal(s) => {
                s.check_same_space(like)?;
                Ok(s.clone())
            }
        }
    }

    pub fn distance(&self, a: &Signal, b: &Signal) -> f64 {
        self.stop_norm.distance(a, b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub solution: Signal,
    /// Internal port variables (one per inverse node for nested solves).
    pub auxiliary: Vec<Signal>,
    pub iterations: usize,
    /// Successive-iterate distance after each iteration.
    pub residuals: Vec<f64>,
    pub converged: bool,
    /// Norm of the problem residual at the final iterate, when evaluable.
    pub fixed_point_residual: Option<f64>,
    pub resolvent_evaluations: usize,
}

/// Outcome of the shared iteration loop.
#[derive(Clone, Debug, Default)]
pub(crate) struct Trace {
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// Runs `step` until it reports a distance `<= epsilon` or `max_iter`
/// iterations have run. A non-finite distance means the iterates blew up.
pub(crate) fn iterate(cfg: &SolverConfig, mut step: impl FnMut(usize) -> Result<f64>) -> Result<Trace> {
    let mut trace = Trace::default();
    for iteration in 1..=cfg.max_iter {
        let d = step(iteration)?;
        if !d.is_finite() {
            return Err(Error::NonFinite { iteration });
        }
        trace.residuals.push(d);
        if d <= cfg.epsilon {
            trace.converged = true;
            break;
        }
    }
    Ok(trace)
}

/// Iterates `x ↦ map(x)` from `x0`.
pub fn fixed_point_drive(
    mut map: impl FnMut(&Signal) -> Result<Signal>,
    x0: Signal,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    cfg.validate()?;
    let mut x = x0;
    let trace = iterate(cfg, |_| {
        let next = map(&x)?;
        next.check_same_space(&x)?;
        let d = cfg.distance(&next, &x);
        x = next;
        Ok(d)
    })?;
    Ok(SolveResult {
        iterations: trace.residuals.len(),
        solution: x,
        auxiliary: Vec::new(),
        residuals: trace.residuals,
        converged: trace.converged,
        fixed_point_residual: None,
        resolvent_evaluations: 0,
    })
}

/// `‖Σ sign_i · op_i(x) - drive‖`, or `None` if some term cannot be
/// evaluated at `x`.
///
/// When an operator has a pole at DC its forward map is taken on the
/// zero-mean part of `x`, and the constant component of the sum is dropped:
/// the maximal extension of such an operator contains every constant at
/// zero-mean inputs.
pub fn inclusion_residual(terms: &[(f64, &OperatorSpec)], x: &Signal, drive: &Signal) -> Option<f64> {
    let dc_pole = terms.iter().any(|(_, op)| op.requires_zero_mean());
    let x_eval = if dc_pole { x.remove_mean() } else { x.clone() };
    let mut total = drive.scale(-1.0);
    for (sign, op) in terms {
        total = total.add_scaled(*sign, &op.apply(&x_eval).ok()?);
    }
    if dc_pole {
        total = total.remove_mean();
    }
    let r = norm(&total);
    r.is_finite().then_some(r)
}

/// Solves `0 ∈ M1(x) + M2(x) - drive` with `x ← res_{αM2}(x - αM1(x) + α·drive)`.
/// `m1` must be single-valued.
pub fn forward_backward(
    m1: &OperatorSpec,
    m2: &OperatorSpec,
    drive: &Signal,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    cfg.validate()?;
    let alpha = cfg.alpha;
    let mut x = cfg.initial(drive)?;
    let mut evaluations = 0;
    let trace = iterate(cfg, |_| {
        let forward = m1.apply(&x)?;
        let arg = x.add_scaled(-alpha, &forward).add_scaled(alpha, drive);
        let next = m2.resolvent(alpha, &arg)?;
        evaluations += 1;
        let d = cfg.distance(&next, &x);
        x = next;
        Ok(d)
    })?;
    Ok(SolveResult {
        fixed_point_residual: inclusion_residual(&[(1.0, m1), (1.0, m2)], &x, drive),
        iterations: trace.residuals.len(),
        solution: x,
        auxiliary: Vec::new(),
        residuals: trace.residuals,
        converged: trace.converged,
        resolvent_evaluations: evaluations,
    })
}

fn average(z: &Signal, reflected: &Signal) -> Signal {
    z.zip_map(reflected, |a, b| 0.5 * (a + b))
}

/// The averaged reflection `z ↦ ½(z + R_{αM1}(R_{αM2}(z)))`.
pub fn dr_map<'a>(m1: &'a OperatorSpec, m2: &'a OperatorSpec, alpha: f64) -> impl Fn(&Signal) -> Result<Signal> + 'a {
    move |z| {
        let r2 = m2.cayley(alpha, z)?;
        let r1 = m1.cayley(alpha, &r2)?;
        Ok(average(z, &r1))
    }
}

/// State of a Douglas–Rachford run whose first operator is shifted by an
/// output offset that may change every iteration.
pub(crate) struct DrRun {
    pub x: Signal,
    pub z: Signal,
    pub trace: Trace,
    pub evaluations: usize,
}

/// Douglas–Rachford iteration on `(m1 + offset_j, m2)`, where `offset_j` is
/// recomputed from the current `x = res_{αM2}(z)` before each update of `z`.
///
/// The governing variable starts at `z = x1 + α·M2(x1)` (or `x1` if `M2`
/// cannot be evaluated there) so that `res_{αM2}(z) = x1`. Each iteration
/// then updates `z` once and compares the new `x` with the previous one.
pub(crate) fn dr_run(
    m1: &OperatorSpec,
    m2: &OperatorSpec,
    x1: &Signal,
    cfg: &SolverConfig,
    mut offset: impl FnMut(&Signal) -> Result<Signal>,
) -> Result<DrRun> {
    let alpha = cfg.alpha;
    let mut z = match m2.apply(x1) {
        Ok(y) => x1.add_scaled(alpha, &y),
        Err(_) => x1.clone(),
    };
    let mut x = m2.resolvent(alpha, &z)?;
    let mut evaluations = 1;
    let trace = iterate(cfg, |_| {
        let shifted = m1.clone().with_offset(offset(&x)?);
        let r2 = x.zip_map(&z, |r, v| 2.0 * r - v);
        let r1 = shifted.cayley(alpha, &r2)?;
        z = average(&z, &r1);
        let next = m2.resolvent(alpha, &z)?;
        evaluations += 2;
        let d = cfg.distance(&next, &x);
        x = next;
        Ok(d)
    })?;
    Ok(DrRun {
        x,
        z,
        trace,
        evaluations,
    })
}

/// Solves `0 ∈ M1(x) + M2(x) - drive` by Douglas–Rachford splitting, with
/// the drive folded into `M1` as an output offset. The solution is
/// `res_{αM2}(z)` at the final `z`.
pub fn douglas_rachford(
    m1: &OperatorSpec,
    m2: &OperatorSpec,
    drive: &Signal,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    cfg.validate()?;
    let x1 = cfg.initial(drive)?;
    let neg_drive = drive.scale(-1.0);
    let run = dr_run(m1, m2, &x1, cfg, |_| Ok(neg_drive.clone()))?;
    Ok(SolveResult {
        fixed_point_residual: inclusion_residual(&[(1.0, m1), (1.0, m2)], &run.x, drive),
        iterations: run.trace.residuals.len(),
        auxiliary: vec![run.z],
        solution: run.x,
        residuals: run.trace.residuals,
        converged: run.trace.converged,
        resolvent_evaluations: run.evaluations,
    })
}
