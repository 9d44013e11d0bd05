use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{JordanCurve, Location};
use crate::potentials::{DomainSide, PotentialField};

/// Dyadic offsets `ρ_j = d·2^{−j}` of the layers, `j = FIRST..=LAST`.
pub const LAYER_FIRST: i32 = 2;
pub const LAYER_LAST: i32 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPointKind {
    /// The curve sample itself.
    Boundary(usize),
    /// Offset from sample `sample` by `layers[layer]` along the normal.
    Offset { sample: usize, layer: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub z: Complex64,
    pub kind: GridPointKind,
}

/// Sample points of the closure of one side: the curve samples plus
/// offset layers along the normal.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureGrid {
    pub side: DomainSide,
    pub points: Vec<GridPoint>,
    /// Offsets of the layers, increasing.
    pub layers: Vec<f64>,
    /// Exterior truncation: every point of a `Minus` grid lies within this
    /// distance of the curve.
    pub r_out: f64,
}

impl ClosureGrid {
    /// Layers `d·2^{−j}`, `j = 10..2`; the exterior grid continues with
    /// `d/2, d, 2d` up to the truncation radius `2d`. Offset points on the
    /// wrong side (or too close to the curve to be told apart) are dropped.
    pub fn new(curve: &JordanCurve, side: DomainSide) -> Self {
        let d = curve.diameter();
        let mut layers: Vec<f64> = (LAYER_FIRST..=LAYER_LAST).rev().map(|j| d * 0.5f64.powi(j)).collect();
        let r_out = 2.0 * d;
        if side == DomainSide::Minus {
            layers.extend([0.5 * d, d, r_out]);
        }
        // the outward normal is the right-hand one for positive orientation
        let outward = if curve.is_positive() { 1.0 } else { -1.0 };
        let dir = match side {
            DomainSide::Plus => -outward,
            DomainSide::Minus => outward,
        };
        let n = curve.len();
        let mut points: Vec<GridPoint> =
            (0..n).map(|k| GridPoint { z: curve.point(k), kind: GridPointKind::Boundary(k) }).collect();
        let offsets: Vec<Option<GridPoint>> = (0..n * layers.len())
            .into_par_iter()
            .map(|i| {
                let (sample, layer) = (i / layers.len(), i % layers.len());
                let z = curve.point(sample) + dir * layers[layer] * curve.normal(sample);
                let ok = match curve.locate(z) {
                    Location::Interior => side == DomainSide::Plus,
                    Location::Exterior => side == DomainSide::Minus && curve.distance(z) <= r_out,
                    Location::Boundary(_) => false,
                };
                ok.then_some(GridPoint { z, kind: GridPointKind::Offset { sample, layer } })
            })
            .collect();
        points.extend(offsets.into_iter().flatten());
        Self { side, points, layers, r_out }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Field values at every grid point, in grid order.
    pub fn evaluate(&self, field: &PotentialField) -> Result<Vec<f64>> {
        if field.side() != self.side {
            return Err(Error::InvalidArgument(format!(
                "field side {} does not match grid side {}",
                field.side(),
                self.side
            )));
        }
        self.points
            .par_iter()
            .map(|p| match p.kind {
                GridPointKind::Boundary(k) => field.boundary_value(k),
                GridPointKind::Offset { .. } => field.eval_open(p.z),
            })
            .collect()
    }
}

/// `ω(f, ε)` over point pairs at distance `<= ε`, for each `ε` of the sorted
/// `grid`, using cells of size `max ε`. Errors when some `ε` has no pair.
pub fn scattered_modulus_table(points: &[Complex64], values: &[f64], grid: &[f64]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let top = *grid.last().unwrap();
    let cell = top;
    let key = |z: Complex64| ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64);
    let mut cells: std::collections::HashMap<(i64, i64), Vec<usize>> = std::collections::HashMap::new();
    for (i, &z) in points.iter().enumerate() {
        cells.entry(key(z)).or_default().push(i);
    }
    let (best, count) = (0..points.len())
        .into_par_iter()
        .fold(
            || (vec![0.0f64; grid.len()], vec![0usize; grid.len()]),
            |(mut best, mut count), i| {
                let (cx, cy) = key(points[i]);
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        let Some(list) = cells.get(&(cx + dx, cy + dy)) else { continue };
                        for &j in list {
                            if j <= i {
                                continue;
                            }
                            let d = (points[j] - points[i]).norm();
                            if d > top || d == 0.0 {
                                continue;
                            }
                            let b = grid.partition_point(|&e| e < d);
                            count[b] += 1;
                            let diff = (values[j] - values[i]).abs();
                            if diff > best[b] {
                                best[b] = diff;
                            }
                        }
                    }
                }
                (best, count)
            },
        )
        .reduce(
            || (vec![0.0; grid.len()], vec![0; grid.len()]),
            |(mut b1, mut c1), (b2, c2)| {
                for k in 0..b1.len() {
                    b1[k] = b1[k].max(b2[k]);
                    c1[k] += c2[k];
                }
                (b1, c1)
            },
        );
    if count[0] == 0 {
        return Err(Error::EmptyPairSet(grid[0]));
    }
    let mut out = best;
    for k in 1..out.len() {
        out[k] = out[k].max(out[k - 1]);
    }
    Ok(out)
}

/// `ω_{closure}(Re g̃, ε)` on `grid` for one `ε`.
pub fn solid_modulus(field: &PotentialField, grid: &ClosureGrid, eps: f64) -> Result<f64> {
    Ok(solid_modulus_table(field, grid, &[eps])?[0])
}

/// Solid modulus for each `ε` of `eps` (any order).
pub fn solid_modulus_table(field: &PotentialField, grid: &ClosureGrid, eps: &[f64]) -> Result<Vec<f64>> {
    if let Some(&e) = eps.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {e}")));
    }
    let values = grid.evaluate(field)?;
    let points: Vec<Complex64> = grid.points.iter().map(|p| p.z).collect();
    let mut sorted = eps.to_vec();
    sorted.sort_by(f64::total_cmp);
    let table = scattered_modulus_table(&points, &values, &sorted)?;
    Ok(eps.iter().map(|e| table[sorted.partition_point(|s| s < e)]).collect())
}
