use num_complex::Complex64;

use super::{point_segment_distance, JordanCurve};
use crate::error::{Error, Result};

/// Parameter sub-intervals of one segment.
pub(crate) type Portions = Vec<(f64, f64)>;

const MAX_GRAZE_DEPTH: usize = 3;

/// Appends to `out` the parts of the parameter range `[a, b]` (one sample
/// segment, endpoints `pa`, `pb`) where `inner < |γ(θ) − center| <= outer`.
/// Level crossings are located on the true parametrization by bisection.
#[allow(clippy::too_many_arguments)]
pub(crate) fn segment_portions(
    curve: &JordanCurve,
    center: Complex64,
    a: f64,
    b: f64,
    pa: Complex64,
    pb: Complex64,
    inner: f64,
    outer: f64,
    out: &mut Portions,
) {
    portions_rec(curve, center, a, b, pa, pb, inner, outer, out, 0)
}

#[allow(clippy::too_many_arguments)]
fn portions_rec(
    curve: &JordanCurve,
    center: Complex64,
    a: f64,
    b: f64,
    pa: Complex64,
    pb: Complex64,
    inner: f64,
    outer: f64,
    out: &mut Portions,
    depth: usize,
) {
    let da = (pa - center).norm();
    let db = (pb - center).norm();
    let chord = (pb - pa).norm();
    let cmin = point_segment_distance(center, pa, pb);
    let slack = 0.5 * chord;
    if cmin > outer + slack || da.max(db) + slack <= inner {
        return;
    }
    let region = |d: f64| d > inner && d <= outer;
    let levels = [inner, outer];
    // chord dips across a level without the endpoints straddling it
    let grazes = levels.iter().any(|&l| l > 0.0 && l.is_finite() && cmin < l && l < da.min(db));
    if grazes && depth < MAX_GRAZE_DEPTH {
        let parts = 8;
        let mut prev = (a, pa);
        for i in 1..=parts {
            let t = if i == parts { b } else { a + (b - a) * i as f64 / parts as f64 };
            let p = if i == parts { pb } else { curve.point_at(t) };
            portions_rec(curve, center, prev.0, t, prev.1, p, inner, outer, out, depth + 1);
            prev = (t, p);
        }
        return;
    }
    let mut cuts: [f64; 2] = [f64::NAN; 2];
    let mut n_cuts = 0;
    for &level in &levels {
        if level > 0.0 && level.is_finite() && (da - level) * (db - level) < 0.0 {
            cuts[n_cuts] = bisect_level(curve, center, a, b, da < level, level);
            n_cuts += 1;
        }
    }
    if n_cuts == 0 {
        if region(da.max(db)) && region(da.min(db)) || region(mid_distance(curve, center, a, b)) {
            push_merged(out, a, b);
        }
        return;
    }
    let cuts = &mut cuts[..n_cuts];
    cuts.sort_by(f64::total_cmp);
    let mut start = a;
    for &c in cuts.iter().chain(std::iter::once(&b)) {
        if c > start && region(mid_distance(curve, center, start, c)) {
            push_merged(out, start, c);
        }
        start = c;
    }
}

fn mid_distance(curve: &JordanCurve, center: Complex64, a: f64, b: f64) -> f64 {
    (curve.point_at(0.5 * (a + b)) - center).norm()
}

fn push_merged(out: &mut Portions, a: f64, b: f64) {
    if let Some(last) = out.last_mut() {
        if last.1 == a {
            last.1 = b;
            return;
        }
    }
    out.push((a, b));
}

fn bisect_level(curve: &JordanCurve, center: Complex64, mut lo: f64, mut hi: f64, lo_inside: bool, level: f64) -> f64 {
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let inside = (curve.point_at(mid) - center).norm() < level;
        if inside == lo_inside {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `γ_ε(x) = {t ∈ γ : |t − x| ≤ ε}` as parameter intervals, with its arc measure `θ_x(ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcNeighborhood {
    pub center: usize,
    pub radius: f64,
    /// Disjoint `(start, end)` parameter intervals; `end` may exceed 1 when an
    /// interval wraps through `θ = 0`.
    pub intervals: Vec<(f64, f64)>,
    pub measure: f64,
}

impl ArcNeighborhood {
    pub fn contains_param(&self, theta: f64) -> bool {
        let t = theta - theta.floor();
        self.intervals.iter().any(|&(s, e)| (t >= s && t <= e) || (t + 1.0 >= s && t + 1.0 <= e))
    }
}

/// `γ_eps(x)` for the sample `x`.
pub fn arc_neighborhood(curve: &JordanCurve, x: usize, eps: f64) -> Result<ArcNeighborhood> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if eps >= curve.diameter() {
        return Ok(ArcNeighborhood {
            center: x,
            radius: eps,
            intervals: vec![(0.0, 1.0)],
            measure: curve.total_length(),
        });
    }
    let (intervals, measure) = collect(curve, x, eps);
    Ok(ArcNeighborhood { center: x, radius: eps, intervals, measure })
}

fn collect(curve: &JordanCurve, x: usize, eps: f64) -> (Vec<(f64, f64)>, f64) {
    let n = curve.len();
    let center = curve.point(x);
    let mut out = Portions::new();
    let mut measure = 0.0;
    let mut buf = Portions::new();
    for k in 0..n {
        let (a, b) = curve.segment(k);
        buf.clear();
        segment_portions(curve, center, a, b, curve.point(k), curve.point(k + 1), -1.0, eps, &mut buf);
        for &(s, e) in &buf {
            measure += if s == a && e == b { curve.segment_arc(k) } else { curve.arc_between(s, e) };
            push_merged(&mut out, s, e);
        }
    }
    if out.len() > 1 && out[0].0 == 0.0 && out.last().unwrap().1 == 1.0 {
        let first = out.remove(0);
        out.last_mut().unwrap().1 = 1.0 + first.1;
    }
    (out, measure)
}

/// `θ_x(ε)` only.
pub(crate) fn neighborhood_measure(curve: &JordanCurve, x: usize, eps: f64) -> f64 {
    if eps >= curve.diameter() {
        return curve.total_length();
    }
    collect(curve, x, eps).1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AhlforsRow {
    pub eps: f64,
    /// `θ(ε) = sup_x θ_x(ε)` over the samples.
    pub theta: f64,
    pub ratio: f64,
    /// Sample attaining the sup.
    pub argmax: usize,
}

/// Ahlfors-regularity table `(ε, θ(ε), θ(ε)/ε)`.
pub fn ahlfors_report(curve: &JordanCurve, eps_grid: &[f64]) -> Result<Vec<AhlforsRow>> {
    if eps_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if eps_grid.iter().any(|&e| !(e > 0.0)) || eps_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("eps grid must be positive and sorted".into()));
    }
    use rayon::prelude::*;
    Ok(eps_grid
        .iter()
        .map(|&eps| {
            let (theta, argmax) = (0..curve.len())
                .into_par_iter()
                .map(|x| (neighborhood_measure(curve, x, eps), x))
                .reduce(|| (0.0, 0), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
            AhlforsRow { eps, theta, ratio: theta / eps, argmax }
        })
        .collect())
}

/// Serializes an Ahlfors table with header `epsilon,theta,theta_over_eps`.
pub fn ahlfors_csv(rows: &[AhlforsRow]) -> String {
    let mut s = String::from("epsilon,theta,theta_over_eps\n");
    for r in rows {
        s.push_str(&format!("{},{},{}\n", r.eps, r.theta, r.ratio));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_curve;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn unit_circle() -> JordanCurve {
        build_curve("circle:center=-1,radius=1", 1024).unwrap()
    }

    fn square() -> JordanCurve {
        build_curve("polygon:(0,0),(1,0),(1,1),(0,1)", 1024).unwrap()
    }

    #[test]
    fn whole_curve_when_eps_reaches_diameter() {
        let c = unit_circle();
        let nb = arc_neighborhood(&c, 100, 2.0).unwrap();
        assert_abs_diff_eq!(nb.measure, 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn circle_chord_angle_oracle() {
        let c = unit_circle();
        for x in [0, 77, 512, 1000] {
            let nb = arc_neighborhood(&c, x, 1.0).unwrap();
            assert_abs_diff_eq!(nb.measure, 4.0 * (0.5f64).asin(), epsilon = 1e-6);
            assert_eq!(nb.intervals.len(), 1);
        }
    }

    #[test]
    fn square_vertex_half_unit() {
        let s = square();
        let nb = arc_neighborhood(&s, 0, 0.5).unwrap();
        assert_abs_diff_eq!(nb.measure, 1.0, epsilon = 1e-9);
        // wraps through θ = 0
        assert_eq!(nb.intervals.len(), 1);
        assert!(nb.contains_param(0.1) && nb.contains_param(0.9) && !nb.contains_param(0.5));
        // brute-force sample count oracle
        let inside = s.points().iter().filter(|p| p.norm() <= 0.5).count();
        let h = s.total_length() / s.len() as f64;
        assert!((inside as f64 * h - nb.measure).abs() <= 2.0 * h);
    }

    #[test]
    fn disconnected_neighborhood() {
        // thin rectangle: a point on the bottom edge sees both long edges
        let r = build_curve("polygon:(0,0),(4,0),(4,0.2),(0,0.2)", 2048).unwrap();
        let x = r.nearest_sample(Complex64::new(2.0, 0.0));
        let nb = arc_neighborhood(&r, x, 0.5).unwrap();
        assert_eq!(nb.intervals.len(), 2);
        let top = 2.0 * (0.25f64 - 0.04).sqrt();
        assert_abs_diff_eq!(nb.measure, 1.0 + top, epsilon = 1e-9);
    }

    #[test]
    fn ahlfors_circle_ratios() {
        let c = unit_circle();
        let rows = ahlfors_report(&c, &[0.01, 0.5]).unwrap();
        assert!(rows[0].ratio >= 2.0 && rows[0].ratio <= 2.0001, "{}", rows[0].ratio);
        assert_abs_diff_eq!(rows[1].ratio, 4.0 * 0.25f64.asin() / 0.5, epsilon = 1e-4);
    }

    #[test]
    fn square_edge_interior() {
        let s = square();
        let x = s.nearest_sample(Complex64::new(0.5, 0.0));
        let m = neighborhood_measure(&s, x, 0.1);
        assert_abs_diff_eq!(m, 0.2, epsilon = 2.0 * 4.0 / 1024.0);
    }

    #[test]
    fn ahlfors_rejects_bad_grids() {
        let c = unit_circle();
        assert_eq!(ahlfors_report(&c, &[]), Err(Error::EmptyGrid));
        assert!(ahlfors_report(&c, &[0.5, 0.1]).is_err());
        assert!(arc_neighborhood(&c, 0, 0.0).is_err());
    }
}
