//! Static scalar nonlinearities and the per-sample resolvent root finder.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A pointwise map `R -> R` applied sample by sample.
#[derive(Clone)]
pub enum ScalarMap {
    /// `v ↦ coeff · v³ / 3`
    Cubic(f64),
    /// `v ↦ clamp(slope · v, -limit, limit)`
    Saturation { slope: f64, limit: f64 },
    /// A user-supplied map, optionally with its derivative.
    Custom {
        name: String,
        f: ScalarFn,
        df: Option<ScalarFn>,
    },
}

impl ScalarMap {
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
    ) -> Self {
        ScalarMap::Custom {
            name: name.into(),
            f: Arc::new(f),
            df: df.map(Arc::from),
        }
    }

    pub fn eval(&self, v: f64) -> f64 {
        match self {
            ScalarMap::Cubic(c) => c * v * v * v / 3.0,
            ScalarMap::Saturation { slope, limit } => (slope * v).clamp(-limit, *limit),
            ScalarMap::Custom { f, .. } => f(v),
        }
    }

    pub fn derivative(&self, v: f64) -> f64 {
        match self {
            ScalarMap::Cubic(c) => c * v * v,
            ScalarMap::Saturation { slope, limit } => {
                if (slope * v).abs() < *limit {
                    *slope
                } else {
                    0.0
                }
            }
            ScalarMap::Custom { f, df, .. } => match df {
                Some(df) => df(v),
                None => {
                    let h = 1e-7 * (1.0 + v.abs());
                    (f(v + h) - f(v - h)) / (2.0 * h)
                }
            },
        }
    }

    /// Whether the map is nondecreasing by construction. `None` for custom
    /// maps, whose monotonicity is declared by the caller.
    pub fn intrinsic_monotone(&self) -> Option<bool> {
        match self {
            ScalarMap::Cubic(c) => Some(*c >= 0.0),
            ScalarMap::Saturation { slope, limit } => Some(*slope >= 0.0 && *limit >= 0.0),
            ScalarMap::Custom { .. } => None,
        }
    }
}

impl fmt::Debug for ScalarMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarMap::Cubic(c) => write!(f, "Cubic({c})"),
            ScalarMap::Saturation { slope, limit } => {
                write!(f, "Saturation {{ slope: {slope}, limit: {limit} }}")
            }
            ScalarMap::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl PartialEq for ScalarMap {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ScalarMap::Cubic(a), ScalarMap::Cubic(b)) => a == b,
            (ScalarMap::Saturation { slope: s1, limit: l1 }, ScalarMap::Saturation { slope: s2, limit: l2 }) => {
                s1 == s2 && l1 == l2
            }
            (ScalarMap::Custom { name: n1, f: f1, .. }, ScalarMap::Custom { name: n2, f: f2, .. }) => {
                n1 == n2 && Arc::ptr_eq(f1, f2)
            }
            _ => false,
        }
    }
}

const MAX_ITER: usize = 200;
const MAX_EXPANSIONS: usize = 100;

/// Solves `x + alpha · f(x) = z` for scalar `x`.
///
/// For nondecreasing `f` and `alpha > 0` the root lies between `z` and
/// `z - alpha · f(z)`. If that pair does not bracket a sign change the
/// interval is grown geometrically; failure to bracket means `f` is not
/// monotone. Inside the bracket, Newton steps that leave the bracket are
/// replaced by bisection.
pub fn solve_resolvent(map: &ScalarMap, alpha: f64, z: f64) -> Result<f64> {
    let g = |x: f64| x + alpha * map.eval(x) - z;
    let tol = 1e-12 * (1.0 + z.abs());

    let g_z = g(z);
    if g_z.abs() <= tol {
        return Ok(z);
    }

    // Bracket [a, b] with g(a) and g(b) of opposite signs.
    let (mut a, mut ga) = (z, g_z);
    let mut b = z - alpha * map.eval(z);
    let mut gb = g(b);
    if !(gb.is_finite() && gb.signum() != ga.signum()) {
        let dir = -g_z.signum();
        let mut span = (alpha * map.eval(z)).abs().max(1e-3 * (1.0 + z.abs()));
        let mut found = false;
        for _ in 0..MAX_EXPANSIONS {
            b = z + dir * span;
            gb = g(b);
            if !gb.is_finite() {
                break;
            }
            if gb.signum() != ga.signum() {
                found = true;
                break;
            }
            a = b;
            ga = gb;
            span *= 2.0;
        }
        if !found {
            return Err(Error::BracketFailure { input: z });
        }
    }
    if gb == 0.0 {
        return Ok(b);
    }

    // Orient so that g(lo) < 0 < g(hi).
    let (mut lo, mut hi) = if ga < 0.0 { (a, b) } else { (b, a) };
    let mut x = if ga.abs() < gb.abs() { a } else { b };
    let mut best = (x, g(x).abs());

    for _ in 0..MAX_ITER {
        let gx = g(x);
        if gx.abs() < best.1 {
            best = (x, gx.abs());
        }
        if gx.abs() <= tol {
            return Ok(x);
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let dg = 1.0 + alpha * map.derivative(x);
        let newton = x - gx / dg;
        let (left, right) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let next = if dg.is_finite() && dg != 0.0 && newton > left && newton < right {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == x || (right - left) <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
            break;
        }
        x = next;
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Plain bisection on a known bracket, used as an independent reference.
    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn cubic_resolvent_matches_bisection() {
        let oracle = bisect(|x| x + x * x * x - 1.0, 0.0, 1.0);
        assert!((oracle - 0.6823278038280193).abs() < 1e-12);
        // x + α·c·x³/3 with α=1, c=3 is x + x³.
        let x = solve_resolvent(&ScalarMap::Cubic(3.0), 1.0, 1.0).unwrap();
        assert!((x - oracle).abs() < 1e-12);
        let x = solve_resolvent(&ScalarMap::Cubic(3.0), 1.0, 2.0).unwrap();
        assert!((x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn saturation_resolvent_is_exact() {
        let m = ScalarMap::Saturation { slope: 2.0, limit: 1.0 };
        // Inside the linear region: x + 0.5·2x = 2x = z.
        assert!((solve_resolvent(&m, 0.5, 0.6).unwrap() - 0.3).abs() < 1e-12);
        // Saturated: x + 0.5 = z.
        assert!((solve_resolvent(&m, 0.5, 3.0).unwrap() - 2.5).abs() < 1e-12);
        assert!((solve_resolvent(&m, 0.5, -3.0).unwrap() + 2.5).abs() < 1e-12);
    }

    #[test]
    fn large_inputs_and_steps() {
        for &(alpha, z) in &[(1e-6, 1e6), (1e3, -5.0), (0.05, 1e-300), (10.0, 0.0)] {
            let m = ScalarMap::Cubic(1.0);
            let x = solve_resolvent(&m, alpha, z).unwrap();
            let r = x + alpha * m.eval(x) - z;
            assert!(r.abs() <= 1e-12 * (1.0 + z.abs()) * 4.0, "alpha={alpha} z={z} r={r}");
        }
    }

    #[test]
    fn custom_without_derivative() {
        let m = ScalarMap::custom("atan", f64::atan, None);
        let x = solve_resolvent(&m, 2.0, 1.5).unwrap();
        assert!((x + 2.0 * x.atan() - 1.5).abs() < 1e-11);
    }

    #[test]
    fn non_monotone_map_fails_to_bracket() {
        // With f(v) = -v and α = 1, x + α f(x) is identically zero.
        let m = ScalarMap::custom("neg", |v| -v, None);
        assert!(matches!(
            solve_resolvent(&m, 1.0, 1.0),
            Err(Error::BracketFailure { .. })
        ));
    }
}
