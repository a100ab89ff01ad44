//! Circuit-element relations and their primitive evaluations.
//!
//! Relations are represented operationally: by a forward map (defined for
//! single-valued elements) and a resolvent `(I + αS)^{-1}`. Every splitting
//! algorithm in this crate touches elements only through [`OperatorSpec::apply`],
//! [`OperatorSpec::resolvent`] and [`OperatorSpec::cayley`].

mod lti;
mod monotone;
mod scalar;

pub use lti::TransferFunction;
pub use monotone::{check_monotone, MonotonicityReport, RandomSignals, Verdict, VIOLATION_TOL};
pub use scalar::{solve_resolvent as scalar_resolvent, ScalarMap};

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{dft, idft, Signal};
use lti::BinResponse;

/// A pointwise nonlinearity with a declared monotonicity flag.
#[derive(Clone, Debug, PartialEq)]
pub struct StaticNonlinearity {
    pub map: ScalarMap,
    pub monotone: bool,
}

/// Description of a circuit-element relation.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorSpec {
    /// `x ↦ g x`
    Gain(f64),
    Static(StaticNonlinearity),
    /// Rational transfer function applied as a DFT multiplier.
    Lti(TransferFunction),
    /// `x ↦ -R(x)`
    Negated(Box<OperatorSpec>),
    /// `x ↦ R(x) + offset`
    OffsetOutput {
        inner: Box<OperatorSpec>,
        offset: Signal,
    },
}

/// Declared sign of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Monotone,
    AntiMonotone,
    /// Neither property is declared.
    Unknown,
}

impl Monotonicity {
    pub fn flip(self) -> Self {
        match self {
            Monotonicity::Monotone => Monotonicity::AntiMonotone,
            Monotonicity::AntiMonotone => Monotonicity::Monotone,
            Monotonicity::Unknown => Monotonicity::Unknown,
        }
    }
}

impl OperatorSpec {
    /// `v ↦ coeff · v³ / 3`
    pub fn cubic(coeff: f64) -> Self {
        OperatorSpec::Static(StaticNonlinearity {
            map: ScalarMap::Cubic(coeff),
            monotone: coeff >= 0.0,
        })
    }

    pub fn saturation(slope: f64, limit: f64) -> Self {
        OperatorSpec::Static(StaticNonlinearity {
            map: ScalarMap::Saturation { slope, limit },
            monotone: slope >= 0.0 && limit >= 0.0,
        })
    }

    pub fn custom(map: ScalarMap, monotone: bool) -> Self {
        OperatorSpec::Static(StaticNonlinearity { map, monotone })
    }

    pub fn tf(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        Ok(OperatorSpec::Lti(TransferFunction::new(num, den)?))
    }

    /// `-self`, removing a double negation.
    pub fn negated(self) -> Self {
        match self {
            OperatorSpec::Negated(inner) => *inner,
            other => OperatorSpec::Negated(Box::new(other)),
        }
    }

    /// `x ↦ self(x) + offset`
    pub fn with_offset(self, offset: Signal) -> Self {
        OperatorSpec::OffsetOutput {
            inner: Box::new(self),
            offset,
        }
    }

    /// The modeler's declaration. Transfer functions are declared monotone;
    /// [`check_monotone`] audits that claim.
    pub fn declared(&self) -> Monotonicity {
        match self {
            OperatorSpec::Gain(g) if *g >= 0.0 => Monotonicity::Monotone,
            OperatorSpec::Gain(_) => Monotonicity::AntiMonotone,
            OperatorSpec::Static(s) => match (s.monotone, s.map.intrinsic_monotone()) {
                (true, _) => Monotonicity::Monotone,
                (false, Some(false)) => Monotonicity::AntiMonotone,
                (false, _) => Monotonicity::Unknown,
            },
            OperatorSpec::Lti(_) => Monotonicity::Monotone,
            OperatorSpec::Negated(inner) => inner.declared().flip(),
            OperatorSpec::OffsetOutput { inner, .. } => inner.declared(),
        }
    }

    /// True when the forward map is only defined on zero-mean signals
    /// (a transfer function with a pole at `s = 0`).
    pub fn requires_zero_mean(&self) -> bool {
        match self {
            OperatorSpec::Lti(tf) => tf.has_dc_pole(),
            OperatorSpec::Negated(inner) | OperatorSpec::OffsetOutput { inner, .. } => inner.requires_zero_mean(),
            _ => false,
        }
    }

    /// Forward evaluation of a single-valued operator.
    pub fn apply(&self, x: &Signal) -> Result<Signal> {
        match self {
            OperatorSpec::Gain(g) => Ok(x.scale(*g)),
            OperatorSpec::Static(s) => Ok(x.map(|v| s.map.eval(v))),
            OperatorSpec::Lti(tf) => apply_lti(tf, x),
            OperatorSpec::Negated(inner) => Ok(inner.apply(x)?.scale(-1.0)),
            OperatorSpec::OffsetOutput { inner, offset } => {
                x.check_same_space(offset)?;
                Ok(inner.apply(x)?.add(offset))
            }
        }
    }

    /// `(I + α·self)^{-1}(z)` for `α > 0`.
    pub fn resolvent(&self, alpha: f64, z: &Signal) -> Result<Signal> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "resolvent step must be positive, got {alpha}"
            )));
        }
        self.resolvent_signed(alpha, z)
    }

    /// `2·res(z) - z`
    pub fn cayley(&self, alpha: f64, z: &Signal) -> Result<Signal> {
        Ok(self.resolvent(alpha, z)?.zip_map(z, |r, v| 2.0 * r - v))
    }

    // Solves x + alpha·self(x) = z with alpha of either sign; a negation
    // flips the sign of the step.
    fn resolvent_signed(&self, alpha: f64, z: &Signal) -> Result<Signal> {
        match self {
            OperatorSpec::Gain(g) => {
                let d = 1.0 + alpha * g;
                if d.abs() < 1e-12 {
                    return Err(Error::ResolventSingular { bin: 0 });
                }
                Ok(z.map(|v| v / d))
            }
            OperatorSpec::Static(s) => {
                let out = z
                    .samples()
                    .iter()
                    .map(|&v| scalar::solve_resolvent(&s.map, alpha, v))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Signal::from_raw(out, z.period()))
            }
            OperatorSpec::Lti(tf) => resolvent_lti(tf, alpha, z),
            OperatorSpec::Negated(inner) => inner.resolvent_signed(-alpha, z),
            OperatorSpec::OffsetOutput { inner, offset } => {
                z.check_same_space(offset)?;
                inner.resolvent_signed(alpha, &z.add_scaled(-alpha, offset))
            }
        }
    }
}

fn apply_lti(tf: &TransferFunction, x: &Signal) -> Result<Signal> {
    let n = x.len();
    let mut spectrum = dft(x);
    let mut failure = None;
    spectrum.apply_multiplier(|k, omega| match tf.bin_response(k, n, x.period()) {
        BinResponse::Finite(g) => g,
        BinResponse::Pole if k == 0 => Complex64::new(0.0, 0.0),
        BinResponse::Pole => {
            failure.get_or_insert(Error::PoleOnGrid { bin: k, omega });
            Complex64::new(0.0, 0.0)
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if tf.has_dc_pole() {
        let mean = x.mean();
        if mean.abs() > 1e-9 * (1.0 + x.max_abs()) {
            return Err(Error::DomainViolation(format!(
                "transfer function has a pole at s = 0; input mean {mean:e} is not zero"
            )));
        }
    }
    Ok(idft(&spectrum))
}

// Multiplier 1/(1 + αG) per bin; at a pole the limit is 0.
fn resolvent_lti(tf: &TransferFunction, alpha: f64, z: &Signal) -> Result<Signal> {
    let n = z.len();
    let mut spectrum = dft(z);
    let mut failure = None;
    spectrum.apply_multiplier(|k, _| match tf.bin_response(k, n, z.period()) {
        BinResponse::Finite(g) => {
            let d = 1.0 + alpha * g;
            if d.norm() < 1e-12 {
                failure.get_or_insert(Error::ResolventSingular { bin: k });
                Complex64::new(0.0, 0.0)
            } else {
                d.inv()
            }
        }
        BinResponse::Pole => Complex64::new(0.0, 0.0),
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(idft(&spectrum))
}
