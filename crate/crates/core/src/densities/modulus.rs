//! Modulus of continuity `ω(f, ε) = sup_{|t₁ − t₂| <= ε} |f(t₁) − f(t₂)|`
//! over a finite point set, with chordal distance.

use num_complex::Complex64;
use rayon::prelude::*;

/// `ω(f, ε)` for every `ε` in the sorted `grid`, from one pass over all pairs.
pub fn pair_modulus_table(points: &[Complex64], values: &[f64], grid: &[f64]) -> Vec<f64> {
    assert_eq!(points.len(), values.len());
    if grid.is_empty() {
        return Vec::new();
    }
    let top = *grid.last().unwrap();
    let buckets = (0..points.len())
        .into_par_iter()
        .fold(
            || vec![0.0f64; grid.len()],
            |mut acc, i| {
                let (p, v) = (points[i], values[i]);
                for j in i + 1..points.len() {
                    let d = (points[j] - p).norm();
                    if d > top {
                        continue;
                    }
                    let b = grid.partition_point(|&e| e < d);
                    let diff = (values[j] - v).abs();
                    if diff > acc[b] {
                        acc[b] = diff;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0.0f64; grid.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.max(y);
                }
                a
            },
        );
    let mut out = buckets;
    for i in 1..out.len() {
        out[i] = out[i].max(out[i - 1]);
    }
    out
}
