//! Ray counting `μ_γ(ξ, φ)` and the Král integral `∫₀^{2π} μ_γ(ξ, φ) dφ`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::JordanCurve;
use crate::error::{Error, Result};

/// Number of points of the sample polyline on the open ray `ξ + r e^{iφ}`,
/// `r > 0`, where `ξ` is sample `xi`.
///
/// Crossings are sign changes of the signed distance of the samples to the
/// line through `ξ`. A run of samples lying exactly on the ray counts once
/// when the polyline passes from one side to the other and zero when it
/// touches and returns (grazing); runs attached to `ξ` itself count zero.
pub fn ray_intersection_count(curve: &JordanCurve, xi: usize, phi: f64) -> usize {
    let rot = Complex64::from_polar(1.0, -phi);
    let base = curve.point(xi);
    let n = curve.len();
    // walk ξ → ξ+1 → … → ξ−1 → ξ; the two ends are ξ itself
    let coord = |j: usize| -> (f64, f64) {
        if j == 0 || j == n {
            return (0.0, 0.0);
        }
        let w = (curve.point(xi + j) - base) * rot;
        (w.re, w.im)
    };
    let mut count = 0;
    let mut j = 0;
    let mut prev = coord(0);
    while j < n {
        let next = coord(j + 1);
        if j + 1 < n && next.1 == 0.0 {
            // a run of samples on the line through ξ
            let mut end = j + 1;
            while end + 1 < n && coord(end + 1).1 == 0.0 {
                end += 1;
            }
            let after = coord(end + 1);
            let attached = j == 0 || end + 1 == n;
            if !attached && next.0 > 0.0 && prev.1 * after.1 < 0.0 {
                count += 1;
            }
            j = end;
            prev = coord(end);
            continue;
        }
        if prev.1 * next.1 < 0.0 {
            let s = prev.1 / (prev.1 - next.1);
            let r = prev.0 + (next.0 - prev.0) * s;
            if r > 0.0 {
                count += 1;
            }
        }
        prev = next;
        j += 1;
    }
    count
}

/// Midpoint-rule value of `∫₀^{2π} μ_γ(ξ, φ) dφ` on `n_angles` directions.
pub fn kral_integral(curve: &JordanCurve, xi: usize, n_angles: usize) -> Result<f64> {
    if n_angles < 360 {
        return Err(Error::InvalidArgument(format!("n_angles must be at least 360, got {n_angles}")));
    }
    let h = TAU / n_angles as f64;
    let total: usize = (0..n_angles).map(|j| ray_intersection_count(curve, xi, (j as f64 + 0.5) * h)).sum();
    Ok(total as f64 * h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KralSup {
    /// Left side of the Král condition over the scanned samples.
    pub sup: f64,
    pub argmax: usize,
    /// `(sample, integral)` for every scanned sample.
    pub values: Vec<(usize, f64)>,
}

/// Král integral at every `stride`-th sample and its maximum.
pub fn kral_sup(curve: &JordanCurve, n_angles: usize, stride: usize) -> Result<KralSup> {
    use rayon::prelude::*;
    let stride = stride.max(1);
    let xs: Vec<usize> = (0..curve.len()).step_by(stride).collect();
    let values =
        xs.par_iter().map(|&x| kral_integral(curve, x, n_angles).map(|v| (x, v))).collect::<Result<Vec<_>>>()?;
    let (argmax, sup) = values.iter().fold((0, f64::NEG_INFINITY), |acc, &(x, v)| if v > acc.1 { (x, v) } else { acc });
    Ok(KralSup { sup, argmax, values })
}
