//! Rational transfer functions realized as DFT multipliers.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::angular_frequency;

/// Magnitude below which a denominator value counts as a pole.
pub(crate) const POLE_TOL: f64 = 1e-12;

/// `G(s) = num(s) / den(s)`, coefficients in descending powers of `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
}

/// Frequency response of one DFT bin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum BinResponse {
    Finite(Complex64),
    Pole,
}

impl TransferFunction {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        if num.is_empty() || den.is_empty() {
            return Err(Error::InvalidConfig(
                "transfer function needs at least one coefficient".into(),
            ));
        }
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig(
                "transfer function coefficients must be finite".into(),
            ));
        }
        if den.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidConfig("denominator is the zero polynomial".into()));
        }
        Ok(TransferFunction { num, den })
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    pub fn numerator_at(&self, s: Complex64) -> Complex64 {
        horner(&self.num, s)
    }

    pub fn denominator_at(&self, s: Complex64) -> Complex64 {
        horner(&self.den, s)
    }

    /// `G(jω)`, or `None` on a pole.
    pub fn response(&self, omega: f64) -> Option<Complex64> {
        let s = Complex64::new(0.0, omega);
        let d = self.denominator_at(s);
        (d.norm() >= POLE_TOL).then(|| self.numerator_at(s) / d)
    }

    /// True when `den(0) = 0`: the operator is only defined on zero-mean
    /// signals.
    pub fn has_dc_pole(&self) -> bool {
        self.denominator_at(Complex64::new(0.0, 0.0)).norm() < POLE_TOL
    }

    /// Response used for bin `k` of an `n`-point grid. At the Nyquist bin of
    /// an even grid only the real part is kept, since a real signal cannot
    /// carry a phase shift there.
    pub(crate) fn bin_response(&self, k: usize, n: usize, period: f64) -> BinResponse {
        match self.response(angular_frequency(k, n, period)) {
            None => BinResponse::Pole,
            Some(g) if n.is_multiple_of(2) && k == n / 2 => BinResponse::Finite(Complex64::new(g.re, 0.0)),
            Some(g) => BinResponse::Finite(g),
        }
    }

    /// Analytic monotonicity on a grid: `Re G(jω_k) >= 0` at every finite
    /// bin. Poles on the grid are admitted (the maximal monotone extension
    /// there is the vertical line).
    pub fn is_monotone_on_grid(&self, n: usize, period: f64) -> bool {
        (0..n).all(|k| match self.bin_response(k, n, period) {
            BinResponse::Finite(g) => g.re >= -1e-12,
            BinResponse::Pole => true,
        })
    }
}

fn horner(coeffs: &[f64], s: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
}
