//! Closed rectifiable Jordan curves sampled on a parameter grid, with the
//! geometric functionals used by the potential estimates.
//!
//! A [`JordanCurve`] keeps the analytic parametrization alongside a sample
//! table of `(θ, position, cumulative arc length)`. All suprema over the curve
//! (`θ(ε)`, the Král integral, the arg variation, `M_γ`) are taken over the
//! sample set, so the sample count is the accuracy knob.

mod kral;
mod neighborhood;
mod shape;
mod spec;

use std::hash::{Hash, Hasher};

use num_complex::Complex64;

pub use kral::{kral_integral, kral_sup, ray_intersection_count, KralSup};
pub use neighborhood::{ahlfors_csv, ahlfors_report, arc_neighborhood, AhlforsRow, ArcNeighborhood};
pub(crate) use neighborhood::{segment_portions, Portions};
pub use shape::{Polygon, Shape, Side};
pub use spec::{build_curve, parse_curve_spec, MIN_SAMPLES};

/// Where a query point sits relative to the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    /// Inside `D⁺`.
    Interior,
    /// Inside `D⁻`.
    Exterior,
    /// Within half a sample spacing of the curve; carries the nearest sample.
    Boundary(usize),
}

#[derive(Debug, Clone)]
pub struct JordanCurve {
    spec: String,
    shape: Shape,
    reversed: bool,
    params: Vec<f64>,
    points: Vec<Complex64>,
    /// Cumulative arc length at each sample, with a closing entry.
    arc: Vec<f64>,
    total_length: f64,
    diameter: f64,
    spacing: f64,
}

impl JordanCurve {
    /// Samples `shape` at `n` parameters; `label` is kept for reports.
    pub fn from_shape(shape: Shape, n: usize, label: &str) -> crate::Result<Self> {
        if n < MIN_SAMPLES {
            return Err(crate::Error::TooFewSamples { got: n, min: MIN_SAMPLES });
        }
        let params = match &shape {
            Shape::Polygon(p) => polygon_params(p, n)?,
            _ => (0..n).map(|k| k as f64 / n as f64).collect(),
        };
        Ok(Self::assemble(shape, false, params, label.to_string()))
    }

    fn assemble(shape: Shape, reversed: bool, params: Vec<f64>, spec: String) -> Self {
        let n = params.len();
        let map = |t: f64| if reversed { shape::wrap(1.0 - t) } else { t };
        let points: Vec<Complex64> = params.iter().map(|&t| shape.point(map(t))).collect();
        let mut arc = Vec::with_capacity(n + 1);
        arc.push(0.0);
        for k in 0..n {
            let (a, b) = (params[k], if k + 1 < n { params[k + 1] } else { 1.0 });
            // arc length is invariant under reversal of the parameter range
            let len = if reversed { shape.arc_length(1.0 - b, 1.0 - a) } else { shape.arc_length(a, b) };
            arc.push(arc[k] + len);
        }
        let total_length = arc[n];
        let spacing = (0..n).map(|k| (points[(k + 1) % n] - points[k]).norm()).fold(0.0, f64::max);
        let diameter = sampled_diameter(&points);
        Self { spec, shape, reversed, params, points, arc, total_length, diameter, spacing }
    }

    /// The same curve traversed in the opposite direction. Sample `k` of the
    /// result is sample `(N - k) mod N` of `self`.
    pub fn reversed(&self) -> Self {
        let n = self.len();
        let mut params = Vec::with_capacity(n);
        params.push(0.0);
        for k in (1..n).rev() {
            params.push(1.0 - self.params[k]);
        }
        Self::assemble(self.shape.clone(), !self.reversed, params, self.spec.clone())
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, k: usize) -> Complex64 {
        self.points[k % self.len()]
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Parameter of sample `k`, with `param(N) == 1`.
    pub fn param(&self, k: usize) -> f64 {
        if k == self.len() {
            1.0
        } else {
            self.params[k]
        }
    }

    /// Cumulative arc length table (`N + 1` entries, last = total length).
    pub fn arc_table(&self) -> &[f64] {
        &self.arc
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Largest sampled chord `max |t₁ − t₂|`.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Largest chord between consecutive samples.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `true` when the traversal is counterclockwise.
    pub fn is_positive(&self) -> bool {
        signed_area(&self.points) > 0.0
    }

    pub fn point_at(&self, theta: f64) -> Complex64 {
        self.shape.point(self.map(theta))
    }

    /// One-sided derivative `dγ/dθ`.
    pub fn derivative_at(&self, theta: f64, side: Side) -> Complex64 {
        if self.reversed {
            let flipped = match side {
                Side::Left => Side::Right,
                Side::Right => Side::Left,
            };
            -self.shape.derivative(self.map(theta), flipped)
        } else {
            self.shape.derivative(theta, side)
        }
    }

    fn map(&self, theta: f64) -> f64 {
        if self.reversed {
            shape::wrap(1.0 - theta)
        } else {
            theta
        }
    }

    /// Arc length between parameters `t0 <= t1`, where `t1 - t0 <= 1` and the
    /// range may run past 1.
    pub fn arc_between(&self, t0: f64, t1: f64) -> f64 {
        if t1 <= t0 {
            return 0.0;
        }
        let (lo, hi) = if self.reversed { (1.0 - t1, 1.0 - t0) } else { (t0, t1) };
        // shift into [0, 1] pieces
        let shift = lo.floor();
        let (lo, hi) = (lo - shift, hi - shift);
        if hi <= 1.0 {
            self.shape.arc_length(lo, hi)
        } else {
            self.shape.arc_length(lo, 1.0) + self.shape.arc_length(0.0, hi - 1.0)
        }
    }

    /// Segment `k` joins sample `k` to sample `k + 1` (mod N); returns its
    /// parameter range with the end lifted so that `end > start`.
    pub fn segment(&self, k: usize) -> (f64, f64) {
        (self.params[k], self.param(k + 1))
    }

    pub fn segment_arc(&self, k: usize) -> f64 {
        self.arc[k + 1] - self.arc[k]
    }

    pub fn nearest_sample(&self, z: Complex64) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (k, p) in self.points.iter().enumerate() {
            let d = (p - z).norm_sqr();
            if d < best.0 {
                best = (d, k);
            }
        }
        best.1
    }

    /// Distance from `z` to the sample polyline.
    pub fn distance(&self, z: Complex64) -> f64 {
        let n = self.len();
        (0..n)
            .map(|k| point_segment_distance(z, self.points[k], self.points[(k + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Winding number of the sample polygon about `z` (`z` off the polygon).
    pub fn winding_number(&self, z: Complex64) -> i32 {
        let n = self.len();
        let total: f64 = (0..n).map(|k| ((self.points[(k + 1) % n] - z) / (self.points[k] - z)).arg()).sum();
        (total / std::f64::consts::TAU).round() as i32
    }

    /// Classifies `z`; points within half a sample spacing count as boundary.
    pub fn locate(&self, z: Complex64) -> Location {
        if self.distance(z) < 0.5 * self.spacing {
            return Location::Boundary(self.nearest_sample(z));
        }
        if self.winding_number(z) != 0 {
            Location::Interior
        } else {
            Location::Exterior
        }
    }

    /// Unit normal at sample `k` pointing to the right of the direction of
    /// travel (outward for positively oriented curves). At corners it bisects
    /// the two edge normals.
    pub fn normal(&self, k: usize) -> Complex64 {
        let t = self.params[k];
        let right = self.derivative_at(t, Side::Right);
        let left = self.derivative_at(t, Side::Left);
        let tau = right / right.norm() + left / left.norm();
        let tau = if tau.norm() < 1e-12 { right } else { tau };
        -Complex64::i() * tau / tau.norm()
    }

    /// Checks that no two non-adjacent sample chords intersect. Quadratic.
    pub fn is_simple(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            let (a, b) = (self.points[i], self.points[(i + 1) % n]);
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (c, d) = (self.points[j], self.points[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Hash of the sampled geometry, used for cache keys.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.spec.hash(&mut h);
        self.reversed.hash(&mut h);
        self.len().hash(&mut h);
        self.total_length.to_bits().hash(&mut h);
        h.finish()
    }
}

fn polygon_params(p: &Polygon, n: usize) -> crate::Result<Vec<f64>> {
    let k = p.vertices().len();
    if n < k {
        return Err(crate::Error::TooFewSamples { got: n, min: k });
    }
    let breaks = p.breaks();
    // samples per edge proportional to length, at least one, summing to n
    let mut counts: Vec<usize> =
        (0..k).map(|e| (((breaks[e + 1] - breaks[e]) * n as f64).round() as usize).max(1)).collect();
    loop {
        let total: usize = counts.iter().sum();
        if total == n {
            break;
        }
        let widest = |c: &[usize]| {
            (0..k)
                .max_by(|&a, &b| {
                    let wa = (breaks[a + 1] - breaks[a]) / c[a] as f64;
                    let wb = (breaks[b + 1] - breaks[b]) / c[b] as f64;
                    wa.total_cmp(&wb)
                })
                .unwrap()
        };
        if total < n {
            let e = widest(&counts);
            counts[e] += 1;
        } else {
            let e = (0..k)
                .filter(|&e| counts[e] > 1)
                .min_by(|&a, &b| {
                    let wa = (breaks[a + 1] - breaks[a]) / counts[a] as f64;
                    let wb = (breaks[b + 1] - breaks[b]) / counts[b] as f64;
                    wa.total_cmp(&wb)
                })
                .unwrap();
            counts[e] -= 1;
        }
    }
    let mut params = Vec::with_capacity(n);
    for e in 0..k {
        let (a, b) = (breaks[e], breaks[e + 1]);
        for j in 0..counts[e] {
            params.push(if j == 0 { a } else { a + (b - a) * j as f64 / counts[e] as f64 });
        }
    }
    Ok(params)
}

fn sampled_diameter(points: &[Complex64]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max((p - q).norm_sqr());
        }
    }
    best.sqrt()
}

pub(crate) fn signed_area(points: &[Complex64]) -> f64 {
    let n = points.len();
    0.5 * (0..n)
        .map(|k| {
            let (a, b) = (points[k], points[(k + 1) % n]);
            a.re * b.im - a.im * b.re
        })
        .sum::<f64>()
}

pub(crate) fn point_segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let s = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * s)).norm()
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Closed-segment intersection test (touching counts).
pub(crate) fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: Complex64, q: Complex64, r: Complex64| {
        r.re >= p.re.min(q.re) && r.re <= p.re.max(q.re) && r.im >= p.im.min(q.im) && r.im <= p.im.max(q.im)
    };
    (d1 == 0.0 && on(a, b, c)) || (d2 == 0.0 && on(a, b, d)) || (d3 == 0.0 && on(c, d, a)) || (d4 == 0.0 && on(c, d, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, SQRT_2};

    fn circle(n: usize) -> JordanCurve {
        build_curve("circle:center=-1,radius=1", n).unwrap()
    }

    #[test]
    fn circle_length_and_diameter() {
        let c = circle(1024);
        assert_abs_diff_eq!(c.total_length(), 2.0 * PI, epsilon = 1e-6);
        assert_abs_diff_eq!(c.diameter(), 2.0, epsilon = 1e-12);
        assert!(c.is_positive());
        assert_abs_diff_eq!(c.point(0).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn square_length_and_diameter() {
        let s = build_curve("polygon:(0,0),(1,0),(1,1),(0,1)", 1024).unwrap();
        assert_eq!(s.total_length(), 4.0);
        assert_abs_diff_eq!(s.diameter(), SQRT_2, epsilon = 1e-9);
        // vertices are samples
        assert_eq!(s.point(256), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn ellipse_length_matches_fine_polyline() {
        let e = build_curve("ellipse:a=2,b=1", 4096).unwrap();
        // polyline oracle at 10^6 chords
        let m = 1_000_000;
        let p = |k: usize| {
            let t = std::f64::consts::TAU * k as f64 / m as f64;
            Complex64::new(2.0 * t.cos(), t.sin())
        };
        let oracle: f64 = (0..m).map(|k| (p(k + 1) - p(k)).norm()).sum();
        assert_abs_diff_eq!(e.total_length(), oracle, epsilon = 1e-8);
        assert_abs_diff_eq!(e.diameter(), 4.0, epsilon = 1e-6);
    }

    #[test]
    fn arc_table_invariants() {
        for spec in ["circle:center=-1,radius=1", "ellipse:a=2,b=1", "polygon:(0,0),(3,0),(1,2)"] {
            let c = build_curve(spec, 300).unwrap();
            let arc = c.arc_table();
            assert!(arc.windows(2).all(|w| w[1] > w[0]));
            assert!((arc[c.len()] - c.total_length()).abs() <= 1e-9 * c.total_length());
            assert!((c.point_at(1.0 - 1e-14) - c.point(0)).norm() < 1e-12);
        }
    }

    #[test]
    fn reversal_maps_samples() {
        let e = build_curve("ellipse:a=2,b=1,center=0.5+0.5i", 256).unwrap();
        let r = e.reversed();
        assert!(!r.is_positive());
        for k in [0, 1, 17, 255] {
            let fwd = e.point((256 - k) % 256);
            assert!((r.point(k) - fwd).norm() < 1e-12);
        }
        assert_abs_diff_eq!(r.total_length(), e.total_length(), epsilon = 1e-10);
        let d = r.derivative_at(r.param(3), Side::Right);
        let fd = (r.point_at(r.param(3) + 1e-7) - r.point_at(r.param(3) - 1e-7)) / 2e-7;
        assert!((d - fd).norm() < 1e-5 * d.norm());
    }

    #[test]
    fn locate_and_normals() {
        let c = circle(512);
        assert_eq!(c.locate(Complex64::new(-1.0, 0.0)), Location::Interior);
        assert_eq!(c.locate(Complex64::new(1.0, 0.0)), Location::Exterior);
        assert_eq!(c.locate(Complex64::new(1e-6, 0.0)), Location::Boundary(0));
        let n0 = c.normal(0);
        assert_abs_diff_eq!(n0.re, 1.0, epsilon = 1e-12);
        let s = build_curve("polygon:(0,0),(1,0),(1,1),(0,1)", 64).unwrap();
        let nv = s.normal(0);
        assert_abs_diff_eq!(nv.re, -SQRT_2 / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(nv.im, -SQRT_2 / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn builtins_are_simple() {
        for spec in [
            "circle:center=0,radius=2",
            "ellipse:a=3,b=0.5",
            "perturbed-circle:radius=1,amp=0.3,freq=5",
            "polygon:(0,0),(2,0),(2,2),(1,0.5),(0,2)",
        ] {
            assert!(build_curve(spec, 256).unwrap().is_simple(), "{spec}");
        }
    }

    #[test]
    fn polygon_params_cover_edges() {
        let s = build_curve("polygon:(0,0),(3,0),(0,1)", 100).unwrap();
        assert_eq!(s.len(), 100);
        let breaks = match s.shape() {
            Shape::Polygon(p) => p.breaks().to_vec(),
            _ => unreachable!(),
        };
        for b in &breaks[..3] {
            assert!(s.params().contains(b));
        }
    }
}
