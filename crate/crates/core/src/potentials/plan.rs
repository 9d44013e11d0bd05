//! Panel quadrature for `∮ g(t) K(t, z) dt` with a kernel that is nearly
//! singular when `z` approaches the curve.
//!
//! Every sample segment is one Gauss–Legendre panel in the curve parameter.
//! Panels containing a singular point of the density are split there and
//! graded geometrically towards it. For a query `z`, a panel is used as is
//! when `z` is far relative to its length; otherwise it is bisected until the
//! estimated Gauss error falls below the tolerance.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;

use crate::densities::Density;
use crate::error::{Error, Result};
use crate::geometry::{JordanCurve, Side};
use crate::quadrature::gauss8;

/// Bisection depth cap for near panels.
pub const MAX_REFINEMENT: usize = 60;

/// Geometric grading levels towards a density singularity.
const GRADING_LEVELS: i32 = 36;

#[derive(Debug, Clone, Copy)]
struct Node {
    t: Complex64,
    /// Weight times `γ'(θ)`.
    dt: Complex64,
    g: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    pa: Complex64,
    pb: Complex64,
    first: usize,
}

/// Precomputed panels and node values for one curve and density.
pub struct QuadraturePlan {
    tol: f64,
    /// Panels with `dist(z, chord) >= near_ratio · chord` need no refinement.
    near_ratio: f64,
    panels: Vec<Panel>,
    nodes: Vec<Node>,
    refined: Mutex<HashMap<u64, f64>>,
}

impl QuadraturePlan {
    pub fn new(curve: &JordanCurve, density: &Density, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        // Gauss error on a panel decays like R^{-16}, R the Bernstein radius
        let r = tol.min(1e-3).powf(-1.0 / 16.0);
        let near_ratio = 1.5 * (r - 1.0 / r) / 4.0 + 0.25;
        let mut ranges = Vec::with_capacity(curve.len());
        let cuts = singular_params(curve, density);
        for k in 0..curve.len() {
            let (a, b) = curve.segment(k);
            let inside: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b).collect();
            let end_lo = cuts.contains(&a);
            let end_hi = cuts.iter().any(|&c| c == b || c + 1.0 == b);
            if inside.is_empty() && !end_lo && !end_hi {
                ranges.push((a, b));
                continue;
            }
            let mut pts = vec![a];
            pts.extend(inside);
            pts.push(b);
            for w in pts.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                graded(lo, hi, lo != a || end_lo, hi != b || end_hi, &mut ranges);
            }
        }
        let mut panels = Vec::with_capacity(ranges.len());
        let mut nodes = Vec::with_capacity(8 * ranges.len());
        for (a, b) in ranges {
            panels.push(Panel { a, b, pa: curve.point_at(a), pb: curve.point_at(b), first: nodes.len() });
            for (theta, w) in gauss8(a, b) {
                let t = curve.point_at(theta);
                nodes.push(Node { t, dt: w * curve.derivative_at(theta, Side::Right), g: 0.0 });
            }
        }
        let values: Vec<f64> = {
            use rayon::prelude::*;
            nodes.par_iter().map(|n| density.value(n.t)).collect()
        };
        for (n, g) in nodes.iter_mut().zip(values) {
            n.g = g;
        }
        Ok(Self { tol, near_ratio, panels, nodes, refined: Mutex::default() })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// `Σ f(t, w·γ', g(t))` over the nodes, refining near `z`. `curve` and
    /// `density` must be the ones the plan was built for.
    pub fn integrate<F>(&self, curve: &JordanCurve, density: &Density, z: Complex64, f: F) -> Result<Complex64>
    where
        F: Fn(Complex64, Complex64, f64) -> Complex64,
    {
        let mut sum = Complex64::new(0.0, 0.0);
        for p in &self.panels {
            if self.is_near(z, p.pa, p.pb) {
                sum += self.refine(curve, density, z, &f, p.a, p.b, p.pa, p.pb, 0)?;
            } else {
                for n in &self.nodes[p.first..p.first + 8] {
                    sum += f(n.t, n.dt, n.g);
                }
            }
        }
        Ok(sum)
    }

    fn is_near(&self, z: Complex64, pa: Complex64, pb: Complex64) -> bool {
        let len = (pb - pa).norm();
        crate::geometry::point_segment_distance(z, pa, pb) < self.near_ratio * len
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F>(
        &self,
        curve: &JordanCurve,
        density: &Density,
        z: Complex64,
        f: &F,
        a: f64,
        b: f64,
        pa: Complex64,
        pb: Complex64,
        depth: usize,
    ) -> Result<Complex64>
    where
        F: Fn(Complex64, Complex64, f64) -> Complex64,
    {
        let m = 0.5 * (a + b);
        let pm = curve.point_at(m);
        let mut sum = Complex64::new(0.0, 0.0);
        for (lo, hi, plo, phi) in [(a, m, pa, pm), (m, b, pm, pb)] {
            if self.is_near(z, plo, phi) {
                if depth + 1 >= MAX_REFINEMENT {
                    return Err(Error::RefinementCap(MAX_REFINEMENT));
                }
                sum += self.refine(curve, density, z, f, lo, hi, plo, phi, depth + 1)?;
            } else {
                for (theta, w) in gauss8(lo, hi) {
                    let t = curve.point_at(theta);
                    let dt = w * curve.derivative_at(theta, Side::Right);
                    sum += f(t, dt, self.g_cached(density, theta, t));
                }
            }
        }
        Ok(sum)
    }

    fn g_cached(&self, density: &Density, theta: f64, t: Complex64) -> f64 {
        let key = theta.to_bits();
        if let Some(&v) = self.refined.lock().unwrap().get(&key) {
            return v;
        }
        let v = density.value(t);
        self.refined.lock().unwrap().insert(key, v);
        v
    }
}

/// Splits `[lo, hi]` into panels graded geometrically towards the flagged ends.
fn graded(lo: f64, hi: f64, grade_lo: bool, grade_hi: bool, out: &mut Vec<(f64, f64)>) {
    match (grade_lo, grade_hi) {
        (false, false) => out.push((lo, hi)),
        (true, true) => {
            let m = 0.5 * (lo + hi);
            graded(lo, m, true, false, out);
            graded(m, hi, false, true, out);
        }
        (true, false) => {
            let w = hi - lo;
            out.push((lo, lo + w * 0.5f64.powi(GRADING_LEVELS)));
            for j in (0..GRADING_LEVELS).rev() {
                out.push((lo + w * 0.5f64.powi(j + 1), lo + w * 0.5f64.powi(j)));
            }
        }
        (false, true) => {
            let w = hi - lo;
            for j in 0..GRADING_LEVELS {
                out.push((hi - w * 0.5f64.powi(j), hi - w * 0.5f64.powi(j + 1)));
            }
            out.push((hi - w * 0.5f64.powi(GRADING_LEVELS), hi));
        }
    }
}

/// Curve parameters closest to the density's singular points, for those
/// within one sample spacing of the curve.
fn singular_params(curve: &JordanCurve, density: &Density) -> Vec<f64> {
    let mut out = Vec::new();
    for s in density.singular_points() {
        let k = curve.nearest_sample(s);
        if (curve.point(k) - s).norm() == 0.0 {
            out.push(curve.param(k));
            continue;
        }
        let n = curve.len();
        let mut best = (f64::INFINITY, 0.0);
        for seg in [(k + n - 1) % n, k] {
            let (a, b) = curve.segment(seg);
            let theta = golden_min(|t| (curve.point_at(t) - s).norm(), a, b);
            let d = (curve.point_at(theta) - s).norm();
            if d < best.0 {
                best = (d, theta);
            }
        }
        if best.0 < curve.spacing() {
            out.push(best.1);
        }
    }
    out
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..100 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}
