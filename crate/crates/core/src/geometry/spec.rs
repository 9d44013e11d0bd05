//! The curve-spec mini-language:
//!
//! ```text
//! circle:center=<re>[+<im>i],radius=<r>
//! ellipse:a=<a>,b=<b>[,center=<re>[+<im>i]]
//! polygon:(x1,y1),...,(xk,yk)
//! perturbed-circle:radius=<r>,amp=<a>,freq=<m>[,center=...]
//! ```

use num_complex::Complex64;

use super::shape::{Polygon, Shape};
use super::{segments_intersect, signed_area, JordanCurve};
use crate::error::{Error, Result};
use crate::parse;

pub const MIN_SAMPLES: usize = 64;

/// Parses a curve spec and samples it at `n_samples` parameters.
pub fn build_curve(spec: &str, n_samples: usize) -> Result<JordanCurve> {
    let shape = parse_curve_spec(spec)?;
    JordanCurve::from_shape(shape, n_samples, &parse::normalize(spec))
}

pub fn parse_curve_spec(spec: &str) -> Result<Shape> {
    let norm = parse::normalize(spec);
    let bad = |reason: &str| Error::CurveSpec { spec: spec.to_string(), reason: reason.to_string() };
    let (family, body) = norm.split_once(':').ok_or_else(|| bad("missing `family:`"))?;
    match family.trim() {
        "polygon" => parse_polygon(body, spec),
        "circle" | "ellipse" | "perturbed-circle" => {
            let kv = parse::key_values(body).ok_or_else(|| bad("expected key=value list"))?;
            let mut center = Complex64::new(0.0, 0.0);
            let mut nums = std::collections::HashMap::new();
            for (k, v) in kv {
                if k == "center" {
                    center = parse::complex(&v).ok_or_else(|| bad("bad center"))?;
                } else {
                    let x = parse::real(&v).ok_or_else(|| bad(&format!("bad value for `{k}`")))?;
                    if nums.insert(k.clone(), x).is_some() {
                        return Err(bad(&format!("duplicate key `{k}`")));
                    }
                }
            }
            let mut take = |key: &str| nums.remove(key).ok_or_else(|| bad(&format!("missing `{key}`")));
            let shape = match family.trim() {
                "circle" => {
                    let radius = take("radius")?;
                    if radius <= 0.0 {
                        return Err(bad("radius must be positive"));
                    }
                    Shape::Circle { center, radius }
                }
                "ellipse" => {
                    let (a, b) = (take("a")?, take("b")?);
                    if a <= 0.0 || b <= 0.0 {
                        return Err(bad("semi-axes must be positive"));
                    }
                    Shape::Ellipse { center, a, b }
                }
                _ => {
                    let (radius, amp, freq) = (take("radius")?, take("amp")?, take("freq")?);
                    if radius <= 0.0 {
                        return Err(bad("radius must be positive"));
                    }
                    if amp.abs() >= 1.0 {
                        return Err(bad("|amp| must be below 1"));
                    }
                    if freq < 0.0 || freq.fract() != 0.0 {
                        return Err(bad("freq must be a non-negative integer"));
                    }
                    Shape::PerturbedCircle { center, radius, amp, freq: freq as u32 }
                }
            };
            if let Some(k) = nums.keys().next() {
                return Err(bad(&format!("unknown key `{k}`")));
            }
            Ok(shape)
        }
        other => Err(bad(&format!("unknown family `{other}`"))),
    }
}

fn parse_polygon(body: &str, spec: &str) -> Result<Shape> {
    let bad = |reason: &str| Error::CurveSpec { spec: spec.to_string(), reason: reason.to_string() };
    let mut vertices = Vec::new();
    let mut rest = body.trim();
    while !rest.is_empty() {
        let open = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
        let close = open.find(')').ok_or_else(|| bad("unclosed `(`"))?;
        let (x, y) = open[..close].split_once(',').ok_or_else(|| bad("vertex needs x,y"))?;
        let x = parse::real(x).ok_or_else(|| bad("bad vertex coordinate"))?;
        let y = parse::real(y).ok_or_else(|| bad("bad vertex coordinate"))?;
        vertices.push(Complex64::new(x, y));
        rest = open[close + 1..].trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    if vertices.len() < 3 {
        return Err(bad("polygon needs at least 3 vertices"));
    }
    let k = vertices.len();
    for i in 0..k {
        if (vertices[(i + 1) % k] - vertices[i]).norm() == 0.0 {
            return Err(bad("repeated vertex"));
        }
    }
    // non-adjacent edges must be disjoint; adjacent ones may not fold back
    for i in 0..k {
        let (a, b) = (vertices[i], vertices[(i + 1) % k]);
        for j in i + 1..k {
            let (c, d) = (vertices[j], vertices[(j + 1) % k]);
            let adjacent = j == i + 1 || (i == 0 && j == k - 1);
            if adjacent {
                let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                let (u, v) = (p - shared, q - shared);
                let cross = u.re * v.im - u.im * v.re;
                let dot = (u * v.conj()).re;
                if cross == 0.0 && dot > 0.0 {
                    return Err(Error::SelfIntersecting(i, j));
                }
            } else if segments_intersect(a, b, c, d) {
                return Err(Error::SelfIntersecting(i, j));
            }
        }
    }
    if signed_area(&vertices) < 0.0 {
        // keep the first vertex, reverse the traversal
        vertices[1..].reverse();
    }
    Ok(Shape::Polygon(Polygon::new(vertices)))
}
