//! Sampled monotonicity audit: `⟨u1 - u2 | y1 - y2⟩ >= 0`.

use rand::Rng;

use super::OperatorSpec;
use crate::signal::{inner, Signal};

/// Normalized pairings below `-VIOLATION_TOL` count as violations.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    MonotoneConsistent,
    ViolationFound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    /// Pairs that were evaluated successfully.
    pub tested_pairs: usize,
    /// Pairs skipped because evaluation failed or the inputs coincided.
    pub inconclusive: usize,
    /// Smallest `⟨Δu | Δy⟩ / ‖Δu‖²` observed; `+inf` when nothing was tested.
    pub min_pairing: f64,
    pub verdict: Verdict,
}

/// Evaluates the normalized pairing on `trials` input pairs drawn from
/// `sample_pair`.
pub fn check_monotone(
    op: &OperatorSpec,
    mut sample_pair: impl FnMut() -> (Signal, Signal),
    trials: usize,
) -> MonotonicityReport {
    let mut tested = 0;
    let mut inconclusive = 0;
    let mut min_pairing = f64::INFINITY;
    for _ in 0..trials {
        let (u1, u2) = sample_pair();
        let pairing = (|| {
            let du = u1.sub(&u2);
            let scale = inner(&du, &du).ok()?;
            if scale <= 0.0 {
                return None;
            }
            let dy = op.apply(&u1).ok()?.sub(&op.apply(&u2).ok()?);
            Some(inner(&du, &dy).ok()? / scale)
        })();
        match pairing {
            Some(p) if p.is_finite() => {
                tested += 1;
                min_pairing = min_pairing.min(p);
            }
            _ => inconclusive += 1,
        }
    }
    MonotonicityReport {
        tested_pairs: tested,
        inconclusive,
        min_pairing,
        verdict: if min_pairing < -VIOLATION_TOL {
            Verdict::ViolationFound
        } else {
            Verdict::MonotoneConsistent
        },
    }
}

/// Random test inputs on a fixed grid.
///
/// Half of the pairs are broadband (white noise plus a few low harmonics at
/// a random overall scale); the other half are two tones on the same DFT
/// bin with independent amplitude and phase, so that the pairing probes one
/// frequency at a time.
#[derive(Clone, Debug)]
pub struct RandomSignals {
    pub len: usize,
    pub period: f64,
    pub amplitude: f64,
    /// Project samples onto the zero-mean subspace.
    pub zero_mean: bool,
}

impl RandomSignals {
    pub fn new(len: usize, period: f64, amplitude: f64, zero_mean: bool) -> Self {
        RandomSignals {
            len,
            period,
            amplitude,
            zero_mean,
        }
    }

    /// A sampler suited to `op`: zero-mean inputs when its domain requires it.
    pub fn for_operator(op: &OperatorSpec, len: usize, period: f64, amplitude: f64) -> Self {
        RandomSignals::new(len, period, amplitude, op.requires_zero_mean())
    }

    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (Signal, Signal) {
        if rng.random_bool(0.5) {
            (self.broadband(rng), self.broadband(rng))
        } else {
            let first = usize::from(self.zero_mean);
            let bin = rng.random_range(first..=self.len / 2);
            (self.tone(rng, bin), self.tone(rng, bin))
        }
    }

    fn finish(&self, samples: Vec<f64>) -> Signal {
        let s = Signal::from_raw(samples, self.period);
        if self.zero_mean {
            s.remove_mean()
        } else {
            s
        }
    }

    fn broadband<R: Rng + ?Sized>(&self, rng: &mut R) -> Signal {
        let scale = self.amplitude * rng.random_range(0.0..1.0);
        let n = self.len as f64;
        let harmonics: Vec<(f64, f64, f64)> = (1..=3)
            .map(|h| (h as f64, rng.random_range(-1.0..1.0), rng.random_range(0.0..6.3)))
            .collect();
        let samples = (0..self.len)
            .map(|k| {
                let phase = 2.0 * std::f64::consts::PI * k as f64 / n;
                let tones: f64 = harmonics.iter().map(|(h, a, p)| a * (h * phase + p).sin()).sum();
                scale * (0.5 * rng.random_range(-1.0..1.0) + tones)
            })
            .collect();
        self.finish(samples)
    }

    fn tone<R: Rng + ?Sized>(&self, rng: &mut R, bin: usize) -> Signal {
        let a = self.amplitude * rng.random_range(-1.0..1.0);
        let p = rng.random_range(0.0..6.3);
        let n = self.len as f64;
        let samples = (0..self.len)
            .map(|k| a * (2.0 * std::f64::consts::PI * (bin * k) as f64 / n + p).cos())
            .collect();
        self.finish(samples)
    }
}
