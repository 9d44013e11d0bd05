//! Continuous branch of `arg(t − ξ)` on `γ ∖ {ξ}`, its variation, and
//! Stieltjes integrals against `d arg(t − ξ)` with truncation at `|t − ξ| <= δ`.
//!
//! The branch is obtained by unwrapping along the curve, starting just after
//! `ξ` and ending just before it. The two ends are the one-sided limits of
//! `arg(t − ξ)`, i.e. the directions of the forward tangent and of the
//! reversed backward tangent at `ξ`. Any other continuous branch differs by a
//! constant multiple of `2π`, which drops out of every increment.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::densities::CurveFunction;
use crate::error::{Error, Result};
use crate::geometry::{segment_portions, JordanCurve, Portions, Side};

#[derive(Debug, Clone, PartialEq)]
pub struct ArgBranch {
    /// Sample index of `ξ`.
    pub base_point: usize,
    pub base: Complex64,
    /// Parameters along the branch, `θ_ξ` to `θ_ξ + 1` (`N + 1` entries).
    pub params: Vec<f64>,
    /// Unwound argument at each entry of `params`; the ends are the one-sided
    /// limits at `ξ`.
    pub values: Vec<f64>,
    pub total_increment: f64,
    /// `V_γ[arg(t − ξ)]` over the sample polyline.
    pub variation: f64,
    dists: Vec<f64>,
}

impl ArgBranch {
    pub fn new(curve: &JordanCurve, xi: usize) -> Self {
        let n = curve.len();
        let base = curve.point(xi);
        let t0 = curve.param(xi);
        let mut params = Vec::with_capacity(n + 1);
        let mut values = Vec::with_capacity(n + 1);
        let mut dists = Vec::with_capacity(n + 1);
        let mut prev = curve.derivative_at(t0, Side::Right);
        params.push(t0);
        values.push(prev.arg());
        dists.push(0.0);
        let mut variation = 0.0;
        for j in 1..=n {
            let (w, t) = if j == n {
                (-curve.derivative_at(t0, Side::Left), t0 + 1.0)
            } else {
                let k = (xi + j) % n;
                let t = curve.param(k) + if k < xi { 1.0 } else { 0.0 };
                (curve.point(k) - base, t)
            };
            let step = (w / prev).arg();
            variation += step.abs();
            values.push(values[j - 1] + step);
            params.push(t);
            dists.push(if j == n { 0.0 } else { w.norm() });
            prev = w;
        }
        let total_increment = values[n] - values[0];
        Self { base_point: xi, base, params, values, total_increment, variation, dists }
    }

    fn len(&self) -> usize {
        self.values.len() - 1
    }

    /// Direction of `t − ξ` at branch parameter `theta`, using the tangent
    /// limits at the two ends.
    fn direction(&self, curve: &JordanCurve, theta: f64) -> Complex64 {
        let (start, end) = (self.params[0], self.params[self.len()]);
        if theta <= start {
            curve.derivative_at(start, Side::Right)
        } else if theta >= end {
            -curve.derivative_at(start, Side::Left)
        } else {
            curve.point_at(theta) - self.base
        }
    }

    /// `∫ (h(t) − shift) d arg(t − ξ)` over `{t : inner < |t − ξ| <= outer}`.
    ///
    /// Whole segments use the branch increments and the midpoint value of
    /// `h`; segments cut by a level use the exact argument increment of the
    /// retained piece and `h` at its parameter midpoint.
    pub fn integrate(&self, curve: &JordanCurve, h: &dyn CurveFunction, shift: f64, inner: f64, outer: f64) -> f64 {
        let n = self.len();
        let mut sum = 0.0;
        let mut buf = Portions::new();
        for j in 0..n {
            let seg = (self.base_point + j) % n;
            let (a, b) = (self.params[j], self.params[j + 1]);
            let (da, db) = (self.dists[j], self.dists[j + 1]);
            let (pa, pb) = (curve.point(seg), curve.point(seg + 1));
            let slack = 0.5 * (pb - pa).norm();
            if da.min(db) > inner + slack && da.max(db) + slack <= outer {
                sum += (h.at_midpoint(seg) - shift) * (self.values[j + 1] - self.values[j]);
                continue;
            }
            buf.clear();
            segment_portions(curve, self.base, a, b, pa, pb, inner, outer, &mut buf);
            for &(s, e) in &buf {
                if s == a && e == b {
                    sum += (h.at_midpoint(seg) - shift) * (self.values[j + 1] - self.values[j]);
                } else {
                    let inc = (self.direction(curve, e) / self.direction(curve, s)).arg();
                    sum += (h.at_param(0.5 * (s + e)) - shift) * inc;
                }
            }
        }
        sum
    }

    /// The branch shifted by `2π k`; every integral is unchanged.
    pub fn shifted(&self, k: i32) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v += TAU * k as f64;
        }
        out
    }
}

/// The unwound branch of `arg(t − ξ)` for the sample `xi`.
pub fn arg_branch(curve: &JordanCurve, xi: usize) -> ArgBranch {
    ArgBranch::new(curve, xi)
}

/// `V_γ[arg(t − ξ)]`.
pub fn arg_variation(curve: &JordanCurve, xi: usize) -> f64 {
    ArgBranch::new(curve, xi).variation
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationSup {
    pub sup: f64,
    pub argmax: usize,
    pub values: Vec<(usize, f64)>,
}

/// `sup_ξ V_γ[arg(t − ξ)]` over every `stride`-th sample.
pub fn kral_variation_sup(curve: &JordanCurve, stride: usize) -> VariationSup {
    use rayon::prelude::*;
    let xs: Vec<usize> = (0..curve.len()).step_by(stride.max(1)).collect();
    let values: Vec<(usize, f64)> = xs.par_iter().map(|&x| (x, arg_variation(curve, x))).collect();
    let (argmax, sup) = values.iter().fold((0, f64::NEG_INFINITY), |acc, &(x, v)| if v > acc.1 { (x, v) } else { acc });
    VariationSup { sup, argmax, values }
}

/// Result of a truncated Stieltjes integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesValue {
    pub value: f64,
    /// Set when `δ >= d`, so the integration set is empty.
    pub empty_domain: bool,
}

/// `∫_{γ ∖ γ_δ(ξ)} h(t) d arg(t − ξ)`.
pub fn stieltjes_arg_integral(
    curve: &JordanCurve,
    xi: usize,
    h: &dyn CurveFunction,
    delta: f64,
) -> Result<StieltjesValue> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    if delta >= curve.diameter() {
        return Ok(StieltjesValue { value: 0.0, empty_domain: true });
    }
    let value = ArgBranch::new(curve, xi).integrate(curve, h, 0.0, delta, f64::INFINITY);
    Ok(StieltjesValue { value, empty_domain: false })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesOptions {
    pub k_start: u32,
    pub k_max: u32,
    pub tol: f64,
}

impl Default for StieltjesOptions {
    fn default() -> Self {
        Self { k_start: 3, k_max: 14, tol: 1e-5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesLimit {
    pub value: f64,
    /// Truncation radius of the returned value.
    pub delta: f64,
    pub steps: u32,
}

/// `∫_γ (g(t) − g(ξ)) d arg(t − ξ)` as the limit over `δ_k = d·2^{−k}`.
pub fn stieltjes_limit(
    curve: &JordanCurve,
    xi: usize,
    g: &dyn CurveFunction,
    opts: &StieltjesOptions,
) -> Result<StieltjesLimit> {
    let branch = ArgBranch::new(curve, xi);
    stieltjes_limit_on(&branch, curve, g, opts)
}

pub(crate) fn stieltjes_limit_on(
    branch: &ArgBranch,
    curve: &JordanCurve,
    g: &dyn CurveFunction,
    opts: &StieltjesOptions,
) -> Result<StieltjesLimit> {
    let center = g.at_sample(branch.base_point);
    let d = curve.diameter();
    let mut prev: Option<f64> = None;
    for (steps, k) in (opts.k_start..=opts.k_max).enumerate() {
        let delta = d * 0.5f64.powi(k as i32);
        let v = branch.integrate(curve, g, center, delta, f64::INFINITY);
        if let Some(p) = prev {
            if (v - p).abs() < opts.tol {
                return Ok(StieltjesLimit { value: v, delta, steps: steps as u32 + 1 });
            }
        }
        prev = Some(v);
    }
    let last = prev.unwrap_or(f64::NAN);
    let delta = d * 0.5f64.powi(opts.k_max as i32 - 1);
    let previous = branch.integrate(curve, g, center, delta, f64::INFINITY);
    Err(Error::NonConvergence { previous, last })
}

/// `∫_{γ_ε(ξ) ∖ γ_δ(ξ)} (h(t) − shift) d arg(t − ξ)` restricted to the
/// candidate segments `segs`, with principal-value increments.
#[allow(clippy::too_many_arguments)]
pub(crate) fn annulus_integral(
    curve: &JordanCurve,
    xi: usize,
    h: &dyn CurveFunction,
    shift: f64,
    inner: f64,
    outer: f64,
    segs: &[usize],
    buf: &mut Portions,
) -> f64 {
    debug_assert!(inner > 0.0);
    let base = curve.point(xi);
    let mut sum = 0.0;
    for &seg in segs {
        let (a, b) = curve.segment(seg);
        let (pa, pb) = (curve.point(seg), curve.point(seg + 1));
        buf.clear();
        segment_portions(curve, base, a, b, pa, pb, inner, outer, buf);
        for &(s, e) in buf.iter() {
            let (hs, ps, pe) = if s == a && e == b {
                (h.at_midpoint(seg), pa, pb)
            } else {
                (h.at_param(0.5 * (s + e)), curve.point_at(s), curve.point_at(e))
            };
            sum += (hs - shift) * ((pe - base) / (ps - base)).arg();
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::FnOnCurve;
    use crate::geometry::build_curve;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn circle(n: usize) -> JordanCurve {
        build_curve("circle:center=-1,radius=1", n).unwrap()
    }

    fn square(n: usize) -> JordanCurve {
        build_curve("polygon:(0,0),(1,0),(1,1),(0,1)", n).unwrap()
    }

    #[test]
    fn circle_branch_is_half_angle() {
        let c = circle(1024);
        let b = arg_branch(&c, 0);
        assert_abs_diff_eq!(b.total_increment, PI, epsilon = 1e-6);
        // a(θ) = π/2 + θ/2 up to a constant
        for j in [1, 100, 700, 1023] {
            let theta = std::f64::consts::TAU * j as f64 / 1024.0;
            assert_abs_diff_eq!(b.values[j] - b.values[0], theta / 2.0, epsilon = 1e-12);
        }
        let opposite = arg_branch(&c, 512);
        assert_abs_diff_eq!(opposite.total_increment, PI, epsilon = 1e-6);
        assert!(b.values.windows(2).all(|w| (w[1] - w[0]).abs() < PI));
    }

    #[test]
    fn square_vertex_sweep() {
        let s = square(1024);
        let b = arg_branch(&s, 0);
        assert_abs_diff_eq!(b.total_increment, FRAC_PI_2, epsilon = 1e-6);
        assert_abs_diff_eq!(b.variation, FRAC_PI_2, epsilon = 0.01);
        let mid = s.nearest_sample(Complex64::new(0.5, 0.0));
        assert_abs_diff_eq!(arg_variation(&s, mid), PI, epsilon = 0.01);
    }

    #[test]
    fn circle_variation_is_pi() {
        let c = circle(1024);
        for x in [0, 333, 900] {
            assert_abs_diff_eq!(arg_variation(&c, x), PI, epsilon = 0.01);
        }
    }

    #[test]
    fn orientation_flip() {
        let e = build_curve("ellipse:a=2,b=1", 512).unwrap();
        let r = e.reversed();
        for x in [0, 100, 300] {
            let fwd = arg_branch(&e, x);
            let bwd = arg_branch(&r, (512 - x) % 512);
            assert_abs_diff_eq!(fwd.total_increment, -bwd.total_increment, epsilon = 1e-9);
            assert_abs_diff_eq!(fwd.variation, bwd.variation, epsilon = 1e-9);
        }
    }

    #[test]
    fn stieltjes_examples() {
        let c = circle(4096);
        let zero = FnOnCurve::new(&c, |_| 0.0);
        assert_eq!(stieltjes_arg_integral(&c, 0, &zero, 0.1).unwrap().value, 0.0);
        let re = FnOnCurve::new(&c, |t| t.re);
        let v = stieltjes_arg_integral(&c, 0, &re, 1e-7).unwrap();
        assert_abs_diff_eq!(v.value, -PI, epsilon = 1e-4);
        let one = FnOnCurve::new(&c, |_| 1.0);
        let v = stieltjes_arg_integral(&c, 0, &one, 1e-7).unwrap();
        assert_abs_diff_eq!(v.value, PI, epsilon = 1e-4);
        let v = stieltjes_arg_integral(&c, 0, &one, 2.5).unwrap();
        assert!(v.empty_domain && v.value == 0.0);
        assert!(stieltjes_arg_integral(&c, 0, &one, 0.0).is_err());
    }

    #[test]
    fn truncated_matches_closed_form() {
        // ∫ over the arc |θ| > 2 asin(δ/2) of (cos θ − 1)/2 dθ, with ξ = 0
        let c = circle(2048);
        let re = FnOnCurve::new(&c, |t| t.re);
        for delta in [0.3, 1.0, 1.7] {
            let th = 2.0 * (delta / 2.0f64).asin();
            let oracle = 0.5 * ((-th.sin() - (2.0 * PI - th)) - (th.sin() - th));
            let v = stieltjes_arg_integral(&c, 0, &re, delta).unwrap().value;
            assert_abs_diff_eq!(v, oracle, epsilon = 1e-5);
        }
    }

    #[test]
    fn limit_examples() {
        let c = circle(4096);
        let re = FnOnCurve::new(&c, |t| t.re);
        let lim = stieltjes_limit(&c, 0, &re, &StieltjesOptions::default()).unwrap();
        assert_abs_diff_eq!(lim.value, -PI, epsilon = 1e-4);
        let k = FnOnCurve::new(&c, |_| 3.5);
        assert_eq!(stieltjes_limit(&c, 17, &k, &StieltjesOptions::default()).unwrap().value, 0.0);
        let s = square(1024);
        let k = FnOnCurve::new(&s, |_| -2.0);
        assert_eq!(stieltjes_limit(&s, 0, &k, &StieltjesOptions::default()).unwrap().value, 0.0);
    }

    #[test]
    fn limit_reports_nonconvergence() {
        // an oscillating density with no limit at the resolution of the schedule
        let c = circle(1024);
        let osc = FnOnCurve::new(&c, |t| {
            let r = t.norm().max(1e-300);
            (1.0 / r).ln().sin()
        });
        let opts = StieltjesOptions { k_start: 3, k_max: 6, tol: 1e-12 };
        let r = stieltjes_limit(&c, 0, &osc, &opts);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn gauge_invariance() {
        let e = build_curve("ellipse:a=2,b=1", 1024).unwrap();
        let h = FnOnCurve::new(&e, |t| (t.re * 1.3).sin() + t.im * t.im);
        let b = arg_branch(&e, 40);
        let shifted = b.shifted(1);
        for delta in [0.0, 0.05, 0.4] {
            let v0 = b.integrate(&e, &h, 0.2, delta, f64::INFINITY);
            let v1 = shifted.integrate(&e, &h, 0.2, delta, f64::INFINITY);
            assert!((v0 - v1).abs() <= 1e-12, "{v0} {v1}");
        }
    }
}
