//! Fixed and adaptive one-dimensional rules shared by the geometric and
//! potential-theoretic code.

use crate::error::{Error, Result};

/// 8-point Gauss–Legendre nodes on [-1, 1] (symmetric, positive half).
const GL8_X: [f64; 4] =
    [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL8_W: [f64; 4] =
    [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Nodes and weights of the 8-point rule mapped to `[a, b]`.
pub fn gauss8(a: f64, b: f64) -> [(f64, f64); 8] {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 8];
    for i in 0..4 {
        out[2 * i] = (mid - half * GL8_X[i], half * GL8_W[i]);
        out[2 * i + 1] = (mid + half * GL8_X[i], half * GL8_W[i]);
    }
    out
}

pub fn integrate_gauss8<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    gauss8(a, b).iter().map(|&(x, w)| w * f(x)).sum()
}

const SIMPSON_MAX_DEPTH: usize = 48;

/// Adaptive Simpson with Richardson correction, absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    match adaptive_simpson_estimate(f, a, b, tol) {
        (v, true) => Ok(v),
        _ => Err(Error::Quadrature { tol }),
    }
}

/// As [`adaptive_simpson`], returning the best estimate together with
/// whether every subinterval met its share of the tolerance.
pub fn adaptive_simpson_estimate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, bool) {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut ok = true;
    let v = simpson_step(f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH, &mut ok);
    (v, ok)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    ok: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        *ok = false;
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok)
}

/// Log-spaced nodes covering `[lo, hi]` with at least `per_decade` nodes per
/// decade; the endpoints are included exactly.
pub fn log_nodes(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo);
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    let (la, lb) = (lo.ln(), hi.ln());
    let mut v: Vec<f64> = (0..=n).map(|i| (la + (lb - la) * i as f64 / n as f64).exp()).collect();
    v[0] = lo;
    v[n] = hi;
    v
}
