//! Mixed-monotone Douglas–Rachford for `0 ∈ A1(x) + A2(x) - B(x) - drive`,
//! and the van der Pol oscillator as an instance of it.

use crate::error::{Error, Result};
use crate::operators::{Monotonicity, OperatorSpec};
use crate::signal::{norm, Signal};
use crate::splitting::{dr_run, inclusion_residual, Init, SolveResult, SolverConfig};

/// `A1`, `A2` maximal monotone; `B` monotone and single-valued, entering
/// with a minus sign.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedProblem {
    pub a1: OperatorSpec,
    pub a2: OperatorSpec,
    pub b: OperatorSpec,
    pub drive: Signal,
}

impl MixedProblem {
    pub fn new(a1: OperatorSpec, a2: OperatorSpec, b: OperatorSpec, drive: Signal) -> Result<Self> {
        let p = MixedProblem { a1, a2, b, drive };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, op) in [("a1", &self.a1), ("a2", &self.a2), ("b", &self.b)] {
            if op.declared() != Monotonicity::Monotone {
                return Err(Error::NotMonotone(format!("{name} = {op:?} must be declared monotone")));
            }
        }
        if !self.drive.is_finite() {
            return Err(Error::InvalidSignal("drive has non-finite samples".into()));
        }
        Ok(())
    }

    /// `‖A1(x) + A2(x) - B(x) - drive‖`, when evaluable.
    pub fn residual(&self, x: &Signal) -> Option<f64> {
        inclusion_residual(&[(1.0, &self.a1), (1.0, &self.a2), (-1.0, &self.b)], x, &self.drive)
    }
}

/// Runs the mixed-monotone Douglas–Rachford iteration from `x1`:
///
/// ```text
/// x ← res_{αA2}(z)
/// y ← B(x)
/// z ← ½(z + R_{α(A1 - y - drive)}(R_{αA2}(z)))
/// ```
///
/// The governing variable starts at `z = x1 + α·A2(x1)`. With `B = 0` the
/// iterates are exactly those of
/// [`douglas_rachford`](crate::splitting::douglas_rachford) on `(A1, A2)`.
pub fn mmdr(p: &MixedProblem, x1: &Signal, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    x1.check_same_space(&p.drive)?;
    let run = dr_run(&p.a1, &p.a2, x1, cfg, |x| Ok(p.b.apply(x)?.add(&p.drive).scale(-1.0)))?;
    Ok(SolveResult {
        fixed_point_residual: p.residual(&run.x),
        iterations: run.trace.residuals.len(),
        auxiliary: vec![run.z],
        solution: run.x,
        residuals: run.trace.residuals,
        converged: run.trace.converged,
        resolvent_evaluations: run.evaluations,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VdpParams {
    pub mu: f64,
    pub period: f64,
    pub n_samples: usize,
    pub amplitude_init: f64,
}

impl VdpParams {
    pub fn new(mu: f64, period: f64, n_samples: usize) -> Self {
        VdpParams {
            mu,
            period,
            n_samples,
            amplitude_init: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::InvalidConfig(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "period must be positive, got {}",
                self.period
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::InvalidConfig("need at least two samples".into()));
        }
        Ok(())
    }

    /// `amplitude_init · sin(2πt/T)`
    pub fn initial(&self) -> Result<Signal> {
        Signal::sinusoid(self.n_samples, self.period, self.amplitude_init, 1)
    }
}

/// `A1(s) = (s² + 1)/s`, `A2(v) = μv³/3`, `B(v) = μv`, no drive.
pub fn vdp_problem(params: &VdpParams) -> Result<MixedProblem> {
    params.validate()?;
    MixedProblem::new(
        OperatorSpec::tf(vec![1.0, 0.0, 1.0], vec![1.0, 0.0])?,
        OperatorSpec::cubic(params.mu),
        OperatorSpec::Gain(params.mu),
        Signal::zeros(params.n_samples, params.period)?,
    )
}

/// Solutions with a smaller norm are reported as the trivial equilibrium.
pub const TRIVIAL_NORM: f64 = 1e-3;

/// Steady-state van der Pol waveform over one period.
///
/// Starts from [`VdpParams::initial`] unless `cfg.init` is something other
/// than [`Init::Zero`]. A converged solution that collapsed onto the zero
/// equilibrium is reported as [`Error::TrivialFixedPoint`].
pub fn vdp_solve(params: &VdpParams, cfg: &SolverConfig) -> Result<SolveResult> {
    let problem = vdp_problem(params)?;
    let x1 = match cfg.init {
        Init::Zero => params.initial()?,
        _ => cfg.initial(&problem.drive)?,
    };
    let result = mmdr(&problem, &x1, cfg)?;
    let size = norm(&result.solution);
    if result.converged && size < TRIVIAL_NORM {
        return Err(Error::TrivialFixedPoint { norm: size });
    }
    Ok(result)
}

fn vdp_field(mu: f64, (v, w): (f64, f64)) -> (f64, f64) {
    (w, mu * (1.0 - v * v) * w - v)
}

fn rk4_step(mu: f64, s: (f64, f64), h: f64) -> (f64, f64) {
    let k1 = vdp_field(mu, s);
    let k2 = vdp_field(mu, (s.0 + 0.5 * h * k1.0, s.1 + 0.5 * h * k1.1));
    let k3 = vdp_field(mu, (s.0 + 0.5 * h * k2.0, s.1 + 0.5 * h * k2.1));
    let k4 = vdp_field(mu, (s.0 + h * k3.0, s.1 + h * k3.1));
    (
        s.0 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        s.1 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
}

/// Limit-cycle period of `v̈ - μ(1 - v²)v̇ + v = 0`, from a time-domain
/// integration started at `(v, v̇) = (2, 0)`. The period is the mean spacing
/// of upward zero crossings after the transient.
pub fn vdp_period(mu: f64) -> Result<f64> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidConfig(format!("mu must be nonnegative, got {mu}")));
    }
    let h = 1e-3 / (1.0 + mu);
    let transient = 50.0 + 10.0 * mu;
    let mut s = (2.0, 0.0);
    let mut t = 0.0;
    while t < transient {
        s = rk4_step(mu, s, h);
        t += h;
    }
    let mut crossings = Vec::new();
    while crossings.len() < 4 {
        let next = rk4_step(mu, s, h);
        if s.0 < 0.0 && next.0 >= 0.0 {
            crossings.push(t + h * s.0 / (s.0 - next.0));
        }
        s = next;
        t += h;
    }
    Ok((crossings[3] - crossings[0]) / 3.0)
}

/// Golden-section search over `[lo, hi]` for the period whose
/// `cfg.max_iter`-step run has the smallest fixed-point residual. Returns
/// the period and the run at that period.
pub fn scan_period(
    params: &VdpParams,
    cfg: &SolverConfig,
    lo: f64,
    hi: f64,
    rounds: usize,
) -> Result<(f64, SolveResult)> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidConfig(format!("bad period range [{lo}, {hi}]")));
    }
    let run = |period: f64| -> Result<SolveResult> {
        let p = VdpParams {
            period,
            ..params.clone()
        };
        mmdr(&vdp_problem(&p)?, &p.initial()?, cfg)
    };
    let score = |r: &SolveResult| r.fixed_point_residual.unwrap_or(f64::INFINITY);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (score(&run(c)?), score(&run(d)?));
    for _ in 0..rounds {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = score(&run(c)?);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = score(&run(d)?);
        }
    }
    let best = 0.5 * (a + b);
    Ok((best, run(best)?))
}
