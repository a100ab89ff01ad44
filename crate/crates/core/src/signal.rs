//! Periodic sampled signals and their spectra.
//!
//! A [`Signal`] holds one period of a uniformly sampled periodic waveform.
//! The sample spacing is `period / len` and is never stored. Inner products
//! carry the `dt` weight so that norms approximate the continuous-time L2
//! norm over one period and tolerances do not depend on the sample count.

use std::cell::RefCell;
use std::io::{Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// One period of a uniformly sampled periodic signal.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    period: f64,
}

impl Signal {
    /// Builds a signal, checking `len >= 2`, a positive finite period and
    /// finite samples.
    pub fn new(samples: Vec<f64>, period: f64) -> Result<Self> {
        check_space(samples.len(), period)?;
        if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal(format!(
                "sample {k} is not finite ({})",
                samples[k]
            )));
        }
        Ok(Signal { samples, period })
    }

    /// Unchecked constructor for values produced by arithmetic on valid
    /// signals. Finiteness is re-checked by the iteration drivers.
    pub(crate) fn from_raw(samples: Vec<f64>, period: f64) -> Self {
        debug_assert!(samples.len() >= 2 && period > 0.0);
        Signal { samples, period }
    }

    pub fn zeros(len: usize, period: f64) -> Result<Self> {
        Signal::constant(len, period, 0.0)
    }

    pub fn constant(len: usize, period: f64, value: f64) -> Result<Self> {
        Signal::new(vec![value; len], period)
    }

    /// Samples `f(t)` at `t = k * dt` for `k = 0..len`.
    pub fn from_fn(len: usize, period: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_space(len, period)?;
        let dt = period / len as f64;
        Signal::new((0..len).map(|k| f(k as f64 * dt)).collect(), period)
    }

    /// `amplitude * sin(2π h t / T)` for harmonic index `h`.
    pub fn sinusoid(len: usize, period: f64, amplitude: f64, harmonic: u32) -> Result<Self> {
        let w = 2.0 * std::f64::consts::PI * harmonic as f64 / period;
        Signal::from_fn(len, period, |t| amplitude * (w * t).sin())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false: a signal has at least two samples.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dt(&self) -> f64 {
        self.period / self.samples.len() as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Sample instants `k * dt`.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let dt = self.dt();
        (0..self.len()).map(move |k| k as f64 * dt)
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.is_finite())
    }

    /// Errors unless `other` lives on the same grid (length and period).
    pub fn check_same_space(&self, other: &Signal) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        if self.period != other.period {
            return Err(Error::PeriodMismatch {
                left: self.period,
                right: other.period,
            });
        }
        Ok(())
    }

    /// A signal on the same grid with every sample replaced by `value`.
    pub fn filled(&self, value: f64) -> Signal {
        Signal::from_raw(vec![value; self.len()], self.period)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Signal {
        Signal::from_raw(self.samples.iter().map(|&v| f(v)).collect(), self.period)
    }

    /// Pointwise combination. Panics if the lengths differ; callers validate
    /// the signal space before iterating.
    pub fn zip_map(&self, other: &Signal, f: impl Fn(f64, f64) -> f64) -> Signal {
        assert_eq!(self.len(), other.len(), "signal length mismatch");
        Signal::from_raw(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            self.period,
        )
    }

    pub fn add(&self, other: &Signal) -> Signal {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Signal) -> Signal {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Signal {
        self.map(|v| factor * v)
    }

    /// `self + factor * other`
    pub fn add_scaled(&self, factor: f64, other: &Signal) -> Signal {
        self.zip_map(other, |a, b| a + factor * b)
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }

    /// Projection onto the zero-mean subspace.
    pub fn remove_mean(&self) -> Signal {
        let m = self.mean();
        self.map(|v| v - m)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Cyclic shift: sample `k` of the result is sample `k - shift` of `self`.
    pub fn rotate(&self, shift: usize) -> Signal {
        let mut samples = self.samples.clone();
        samples.rotate_right(shift % self.len());
        Signal::from_raw(samples, self.period)
    }

    /// Euclidean norm of the raw sample vector, without the `dt` weight.
    pub fn sample_norm(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn check_space(len: usize, period: f64) -> Result<()> {
    if len < 2 {
        return Err(Error::InvalidSignal(format!(
            "a signal needs at least 2 samples, got {len}"
        )));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidSignal(format!(
            "period must be positive and finite, got {period}"
        )));
    }
    Ok(())
}

/// `dt * Σ x[k] y[k]`, the left-endpoint quadrature of the L2 inner product
/// over one period.
pub fn inner(x: &Signal, y: &Signal) -> Result<f64> {
    x.check_same_space(y)?;
    Ok(x.dt() * dot(&x.samples, &y.samples))
}

/// `sqrt(inner(x, x))`
pub fn norm(x: &Signal) -> f64 {
    (x.dt() * dot(&x.samples, &x.samples)).sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// DFT coefficients of one period, unnormalized: `X[k] = Σ x[n] e^{-2πikn/N}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    coefficients: Vec<Complex64>,
    period: f64,
}

impl Spectrum {
    pub fn new(coefficients: Vec<Complex64>, period: f64) -> Result<Self> {
        check_space(coefficients.len(), period)?;
        Ok(Spectrum { coefficients, period })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Signed angular frequency of bin `k`: `2π k̃ / T` with `k̃ = k` for
    /// `k <= N/2` and `k - N` otherwise.
    pub fn angular_frequency(&self, k: usize) -> f64 {
        angular_frequency(k, self.len(), self.period)
    }

    /// Multiplies bin `k` by `multiplier(k, ω_k)`.
    pub fn apply_multiplier(&mut self, mut multiplier: impl FnMut(usize, f64) -> Complex64) {
        let (n, period) = (self.len(), self.period);
        for (k, c) in self.coefficients.iter_mut().enumerate() {
            *c *= multiplier(k, angular_frequency(k, n, period));
        }
    }
}

pub fn angular_frequency(k: usize, n: usize, period: f64) -> f64 {
    let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    2.0 * std::f64::consts::PI * signed / period
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn transform(buffer: &mut [Complex64], inverse: bool) {
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buffer.len())
        } else {
            p.plan_fft_forward(buffer.len())
        }
    });
    plan.process(buffer);
}

pub fn dft(x: &Signal) -> Spectrum {
    let mut buffer: Vec<Complex64> = x.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(&mut buffer, false);
    Spectrum {
        coefficients: buffer,
        period: x.period,
    }
}

/// Inverse DFT; the imaginary part of the result is discarded.
pub fn idft(s: &Spectrum) -> Signal {
    let mut buffer = s.coefficients.clone();
    transform(&mut buffer, true);
    let scale = 1.0 / buffer.len() as f64;
    Signal::from_raw(buffer.iter().map(|c| c.re * scale).collect(), s.period)
}

/// Writes `t,v` rows, one per sample.
pub fn write_csv<W: Write>(signal: &Signal, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "v"])?;
    for (t, v) in signal.times().zip(signal.samples()) {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(signal: &Signal, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    write_csv(signal, std::io::BufWriter::new(file))
}

/// Reads a `t,v` table. Times must start at 0 and be uniformly spaced; the
/// period is taken as `len * dt`.
pub fn read_csv<R: Read>(reader: R) -> Result<Signal> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "v" {
        return Err(Error::Csv(format!(
            "expected header `t,v`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (row, record) in r.records().enumerate() {
        let record = record?;
        let parse = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Csv(format!("row {}: bad number in column {i}", row + 2)))
        };
        times.push(parse(0)?);
        values.push(parse(1)?);
    }
    if times.len() < 2 {
        return Err(Error::Csv("need at least two rows".into()));
    }
    let dt = times[1] - times[0];
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::Csv("time column must be increasing".into()));
    }
    for (k, &t) in times.iter().enumerate() {
        let expected = k as f64 * dt;
        if (t - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
            return Err(Error::Csv(format!(
                "row {}: time {t} is not on the uniform grid starting at 0",
                k + 2
            )));
        }
    }
    Signal::new(values, dt * times.len() as f64)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Signal> {
    let file = std::fs::File::open(path.as_ref())?;
    read_csv(std::io::BufReader::new(file))
}
