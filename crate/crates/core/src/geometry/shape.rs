//! Analytic parametrizations of the built-in curve families over `θ ∈ [0, 1)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::quadrature::integrate_gauss8;

/// Which one-sided derivative to take at a corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Complex64>,
    /// Parameter of each vertex, plus a closing `1.0`.
    breaks: Vec<f64>,
    length: f64,
}

impl Polygon {
    /// Vertices must already be validated (distinct, positively oriented).
    pub(crate) fn new(vertices: Vec<Complex64>) -> Self {
        let k = vertices.len();
        let mut cum = Vec::with_capacity(k + 1);
        cum.push(0.0);
        for i in 0..k {
            let e = (vertices[(i + 1) % k] - vertices[i]).norm();
            cum.push(cum[i] + e);
        }
        let length = cum[k];
        let mut breaks: Vec<f64> = cum.iter().map(|c| c / length).collect();
        breaks[k] = 1.0;
        Self { vertices, breaks, length }
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Edge index containing `theta` (in `[0, 1)`), choosing the edge that
    /// starts (right) or ends (left) at a vertex when `theta` is one.
    fn edge(&self, theta: f64, side: Side) -> usize {
        let k = self.vertices.len();
        // snap to a break so that `1 - (1 - b)` round-off cannot pick the wrong edge
        let pos = self.breaks.partition_point(|&b| b < theta);
        for cand in [pos.saturating_sub(1), pos.min(k)] {
            if (self.breaks[cand] - theta).abs() < 1e-12 {
                return match side {
                    Side::Right => cand % k,
                    Side::Left => (cand + k - 1) % k,
                };
            }
        }
        pos.saturating_sub(1).min(k - 1)
    }

    fn point(&self, theta: f64) -> Complex64 {
        let e = self.edge(theta, Side::Right);
        let k = self.vertices.len();
        let (a, b) = (self.vertices[e], self.vertices[(e + 1) % k]);
        let span = self.breaks[e + 1] - self.breaks[e];
        // a `theta` just below 1 may snap to the first edge
        let mut off = theta - self.breaks[e];
        if off > 0.5 {
            off -= 1.0;
        }
        let s = (off / span).clamp(0.0, 1.0);
        a + (b - a) * s
    }

    fn derivative(&self, theta: f64, side: Side) -> Complex64 {
        let e = self.edge(theta, side);
        let k = self.vertices.len();
        let (a, b) = (self.vertices[e], self.vertices[(e + 1) % k]);
        (b - a) / (self.breaks[e + 1] - self.breaks[e])
    }
}

/// A closed curve family with an analytic parametrization.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Circle {
        center: Complex64,
        radius: f64,
    },
    Ellipse {
        center: Complex64,
        a: f64,
        b: f64,
    },
    Polygon(Polygon),
    /// `r(θ) = radius * (1 + amp * cos(2π freq θ))` around `center`.
    PerturbedCircle {
        center: Complex64,
        radius: f64,
        amp: f64,
        freq: u32,
    },
}

impl Shape {
    pub fn point(&self, theta: f64) -> Complex64 {
        let theta = wrap(theta);
        match self {
            Shape::Circle { center, radius } => center + Complex64::from_polar(*radius, TAU * theta),
            Shape::Ellipse { center, a, b } => {
                let (s, c) = (TAU * theta).sin_cos();
                center + Complex64::new(a * c, b * s)
            }
            Shape::Polygon(p) => p.point(theta),
            Shape::PerturbedCircle { center, radius, amp, freq } => {
                let r = radius * (1.0 + amp * (TAU * *freq as f64 * theta).cos());
                center + Complex64::from_polar(r, TAU * theta)
            }
        }
    }

    /// One-sided derivative with respect to `θ`.
    pub fn derivative(&self, theta: f64, side: Side) -> Complex64 {
        let theta = wrap(theta);
        match self {
            Shape::Circle { radius, .. } => Complex64::i() * Complex64::from_polar(TAU * radius, TAU * theta),
            Shape::Ellipse { a, b, .. } => {
                let (s, c) = (TAU * theta).sin_cos();
                Complex64::new(-TAU * a * s, TAU * b * c)
            }
            Shape::Polygon(p) => p.derivative(theta, side),
            Shape::PerturbedCircle { radius, amp, freq, .. } => {
                let m = *freq as f64;
                let r = radius * (1.0 + amp * (TAU * m * theta).cos());
                let dr = -radius * amp * TAU * m * (TAU * m * theta).sin();
                let e = Complex64::from_polar(1.0, TAU * theta);
                e * Complex64::new(dr, TAU * r)
            }
        }
    }

    /// Arc length of the parameter range `[t0, t1]`, `t0 <= t1 <= t0 + 1`.
    pub fn arc_length(&self, t0: f64, t1: f64) -> f64 {
        debug_assert!(t1 >= t0);
        match self {
            Shape::Circle { radius, .. } => TAU * radius * (t1 - t0),
            Shape::Polygon(p) => p.length * (t1 - t0),
            _ => {
                let pieces = ((t1 - t0) * 256.0).ceil().max(1.0) as usize;
                let h = (t1 - t0) / pieces as f64;
                (0..pieces)
                    .map(|i| {
                        let a = t0 + i as f64 * h;
                        integrate_gauss8(a, a + h, |t| self.derivative(t, Side::Right).norm())
                    })
                    .sum()
            }
        }
    }

    /// Parameters of the corners (empty for smooth shapes).
    pub fn corners(&self) -> &[f64] {
        match self {
            Shape::Polygon(p) => &p.breaks[..p.breaks.len() - 1],
            _ => &[],
        }
    }
}

pub(crate) fn wrap(theta: f64) -> f64 {
    let t = theta - theta.floor();
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}
