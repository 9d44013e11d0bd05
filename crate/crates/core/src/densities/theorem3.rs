//! The extremal density on `|t + 1| = 1` built from a majorant `μ`:
//!
//! ```text
//! g(t) = 8 ∫₀¹ μ(η) [((Re t)² − (Im t)²)(η⁴ + |t|⁴) − 2η²|t|⁴] / |η² − t²|⁴ · η dη
//! ```

use num_complex::Complex64;

use super::majorant::Majorant;
use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson_estimate;

/// Absolute tolerance of the inner integral.
pub const THEOREM3_TOL: f64 = 1e-8;

fn kernel(eta: f64, x2: f64, y2: f64, r4: f64) -> f64 {
    // |η² − t²|² = (η² − x² + y²)² + 4x²y²
    let e2 = eta * eta;
    let re = e2 - x2 + y2;
    let m2 = re * re + 4.0 * x2 * y2;
    ((x2 - y2) * (e2 * e2 + r4) - 2.0 * e2 * r4) / (m2 * m2)
}

/// Breakpoints of the integration range: the kernel peaks near `η = |t|`.
fn breakpoints(r: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    for c in [0.25 * r, 0.5 * r, r, 2.0 * r, 4.0 * r] {
        if c > 0.0 && c < 1.0 {
            pts.push(c);
        }
    }
    pts.push(1.0);
    pts
}

/// `g(t)` and whether the quadrature met `tol` on every piece.
pub(crate) fn theorem3_estimate(mu: &Majorant, t: Complex64, tol: f64) -> (f64, bool) {
    let (x2, y2) = (t.re * t.re, t.im * t.im);
    let r2 = x2 + y2;
    if r2 == 0.0 {
        return (0.0, true);
    }
    let r4 = r2 * r2;
    let f = |eta: f64| mu.eval(eta) * kernel(eta, x2, y2, r4) * eta;
    let pts = breakpoints(r2.sqrt());
    let share = tol / (8.0 * (pts.len() - 1) as f64);
    let mut sum = 0.0;
    let mut ok = true;
    for w in pts.windows(2) {
        let (v, good) = adaptive_simpson_estimate(&f, w[0], w[1], share);
        sum += v;
        ok &= good;
    }
    (8.0 * sum, ok)
}

pub fn theorem3_value(mu: &Majorant, t: Complex64) -> Result<f64> {
    match theorem3_estimate(mu, t, THEOREM3_TOL) {
        (v, true) => Ok(v),
        _ => Err(Error::Quadrature { tol: THEOREM3_TOL }),
    }
}
