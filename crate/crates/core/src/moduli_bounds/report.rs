use std::fmt::Write as _;

use crate::densities::{Density, Majorant};
use crate::error::{Error, Result};
use crate::geometry::JordanCurve;
use crate::potentials::{m_gamma_table, DomainSide, PotentialField, DEFAULT_TOL, M_GAMMA_LEVELS};
use crate::quadrature::log_nodes;

use super::functionals::{
    bound_thm1, bound_thm2, bound_zygmund, dini_integral, Modulus, ModulusTable, NODES_PER_DECADE,
};
use super::grid::{solid_modulus_table, ClosureGrid};

pub const REPORT_HEADER: &str = "epsilon,omega_curve,omega_solid_plus,omega_solid_minus,m_gamma,bound_thm1,bound_thm2,bound_zygmund,ratio_thm1,ratio_thm2,ratio_lower";

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub sides: Vec<DomainSide>,
    pub tol: f64,
    pub m_levels: u32,
    /// Replaces `ω_γ(g, ·)` in the denominator of `ratio_lower`.
    pub majorant: Option<Majorant>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            sides: vec![DomainSide::Plus, DomainSide::Minus],
            tol: DEFAULT_TOL,
            m_levels: M_GAMMA_LEVELS,
            majorant: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub eps: f64,
    pub omega_curve: f64,
    /// NaN when the side was not requested.
    pub omega_solid_plus: f64,
    pub omega_solid_minus: f64,
    pub m_gamma: f64,
    pub bound_thm1: f64,
    pub bound_thm2: f64,
    pub bound_zygmund: f64,
    pub dini: f64,
    pub ratio_thm1: f64,
    pub ratio_thm2: f64,
    pub ratio_lower: f64,
    /// `ε > d/8`, outside the range of the estimates.
    pub out_of_range: bool,
}

impl BoundRow {
    /// The solid modulus the ratios are built from: `D⁺` if present.
    pub fn omega_solid(&self) -> f64 {
        if self.omega_solid_plus.is_nan() {
            self.omega_solid_minus
        } else {
            self.omega_solid_plus
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub curve: String,
    pub density: String,
    pub diameter: f64,
    pub samples: usize,
    pub m_levels: u32,
    pub r_out: f64,
    pub rows: Vec<BoundRow>,
}

/// `num / den`, with `0/0 = 0`.
pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// `ε ∫_ε^{upper} f(η)/η² dη` for a majorant, in closed form when available.
pub fn majorant_tail(mu: &Majorant, eps: f64, upper: f64) -> Result<f64> {
    if let Some(v) = mu.tail_integral_closed_form(eps, upper) {
        return Ok(v);
    }
    let m = Modulus::Majorant { coef: 1.0, mu: mu.clone() };
    bound_thm2(&m, eps, upper / 2.0)
}

/// Curve modulus `ω_γ(g, ·)` as a table on `[lo, 2d]`, extended below `lo`
/// by the density's small-scale shape.
pub fn curve_modulus(curve: &JordanCurve, g: &Density, lo: f64) -> Result<Modulus> {
    if g.is_constant() {
        return Ok(Modulus::Zero);
    }
    let hi = 2.0 * curve.diameter();
    let eta = log_nodes(lo, hi, NODES_PER_DECADE / 2);
    let omega = g.modulus_table(curve, &eta);
    let mut table = ModulusTable::new(eta, omega)?;
    if let Some(s) = g.small_scale_shape() {
        table = table.with_small_scale(s);
    }
    Ok(Modulus::Table(table))
}

/// Builds the full report for `g` on `curve` over `eps_grid`.
pub fn build_bound_report(
    curve: &JordanCurve,
    g: &Density,
    eps_grid: &[f64],
    opts: &ReportOptions,
) -> Result<BoundReport> {
    if eps_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(&e) = eps_grid.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {e}")));
    }
    let d = curve.diameter();
    let eps_min = eps_grid.iter().copied().fold(f64::INFINITY, f64::min);
    // below a few sample spacings the sampled modulus is quantized
    let lo = (4.0 * curve.spacing()).min(eps_min);
    let omega = curve_modulus(curve, g, lo)?;
    let omega_curve: Vec<f64> = eps_grid.iter().map(|&e| omega.eval(e)).collect::<Result<_>>()?;
    let mg = m_gamma_table(curve, g, eps_grid, opts.m_levels)?;
    let mut solid = [vec![f64::NAN; eps_grid.len()], vec![f64::NAN; eps_grid.len()]];
    let mut r_out = f64::NAN;
    for &side in &opts.sides {
        let field = PotentialField::new(curve.clone(), g.clone(), side, opts.tol);
        let grid = ClosureGrid::new(curve, side);
        if side == DomainSide::Minus {
            r_out = grid.r_out;
        }
        solid[(side == DomainSide::Minus) as usize] = solid_modulus_table(&field, &grid, eps_grid)?;
    }
    let mut rows = Vec::with_capacity(eps_grid.len());
    for (i, &eps) in eps_grid.iter().enumerate() {
        let t2 = bound_thm2(&omega, eps, d)?;
        let t1 = bound_thm1(&omega, mg[i].value, eps, d)?;
        let dini = dini_integral(&omega, eps)?;
        let zyg = if dini.divergent { f64::INFINITY } else { bound_zygmund(&omega, eps, d)? };
        let lower_den = match &opts.majorant {
            Some(mu) => majorant_tail(mu, eps, 2.0 * d)?,
            None => t2,
        };
        let mut row = BoundRow {
            eps,
            omega_curve: omega_curve[i],
            omega_solid_plus: solid[0][i],
            omega_solid_minus: solid[1][i],
            m_gamma: mg[i].value,
            bound_thm1: t1,
            bound_thm2: t2,
            bound_zygmund: zyg,
            dini: if dini.divergent { f64::INFINITY } else { dini.value },
            ratio_thm1: 0.0,
            ratio_thm2: 0.0,
            ratio_lower: 0.0,
            out_of_range: eps > d / 8.0 * (1.0 + 1e-12),
        };
        let w = row.omega_solid();
        row.ratio_thm1 = ratio(w, t1);
        row.ratio_thm2 = ratio(w, t2);
        row.ratio_lower = ratio(w, lower_den);
        rows.push(row);
    }
    Ok(BoundReport {
        curve: curve.spec().to_string(),
        density: g.label().to_string(),
        diameter: d,
        samples: curve.len(),
        m_levels: opts.m_levels,
        r_out,
        rows,
    })
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.12e}")
    }
}

impl BoundReport {
    /// CSV body: header, then one line per `ε`. Rows outside `(0, d/8]` are
    /// preceded by a `# out_of_range=1` comment line.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "# curve={} density={} samples={} m_levels={} r_out={}",
            self.curve,
            self.density,
            self.samples,
            self.m_levels,
            num(self.r_out)
        )
        .unwrap();
        writeln!(s, "{REPORT_HEADER}").unwrap();
        for r in &self.rows {
            if r.out_of_range {
                writeln!(s, "# out_of_range=1 epsilon={}", num(r.eps)).unwrap();
            }
            let cols = [
                r.eps,
                r.omega_curve,
                r.omega_solid_plus,
                r.omega_solid_minus,
                r.m_gamma,
                r.bound_thm1,
                r.bound_thm2,
                r.bound_zygmund,
                r.ratio_thm1,
                r.ratio_thm2,
                r.ratio_lower,
            ];
            let line: Vec<String> = cols.iter().map(|&c| num(c)).collect();
            writeln!(s, "{}", line.join(",")).unwrap();
        }
        s
    }

    /// `max/min` of `ratio_thm1` and `ratio_thm2` over in-range rows.
    pub fn ratio_spreads(&self) -> (f64, f64) {
        let rows: Vec<&BoundRow> = self.rows.iter().filter(|r| !r.out_of_range).collect();
        (spread(rows.iter().map(|r| r.ratio_thm1)), spread(rows.iter().map(|r| r.ratio_thm2)))
    }
}

/// `max/min` of positive values; 1 for an all-zero column, infinity when
/// only some values vanish.
pub fn spread<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() || v.iter().all(|&x| x == 0.0) {
        return 1.0;
    }
    let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessRow {
    pub eps: f64,
    pub omega_solid: f64,
    /// `ε ∫_ε^4 μ(η)/η² dη`.
    pub denominator: f64,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
    pub out_of_range: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessTable {
    pub rows: Vec<SharpnessRow>,
    pub lower_min: f64,
    pub lower_max: f64,
    pub upper_min: f64,
    pub upper_max: f64,
}

impl SharpnessTable {
    pub fn lower_spread(&self) -> f64 {
        spread(self.rows.iter().filter(|r| !r.out_of_range).map(|r| r.ratio_lower))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("epsilon,omega_solid,denominator,ratio_lower,ratio_upper\n");
        for r in &self.rows {
            if r.out_of_range {
                writeln!(s, "# out_of_range=1 epsilon={}", num(r.eps)).unwrap();
            }
            writeln!(
                s,
                "{},{},{},{},{}",
                num(r.eps),
                num(r.omega_solid),
                num(r.denominator),
                num(r.ratio_lower),
                num(r.ratio_upper)
            )
            .unwrap();
        }
        s
    }
}

/// Upper limit of the sharpness denominator (twice the diameter of `|t + 1| = 1`).
pub const SHARPNESS_UPPER: f64 = 4.0;

/// `ω_solid(ε) / (ε ∫_ε^4 μ/η²)` and `ω_solid(ε) / thm2(ε)` per row, with
/// their extremes over rows with `ε <= 1/4`.
pub fn sharpness_ratios(report: &BoundReport, mu: &Majorant) -> Result<SharpnessTable> {
    let mut rows = Vec::with_capacity(report.rows.len());
    for r in &report.rows {
        let w = r.omega_solid();
        let den = majorant_tail(mu, r.eps, SHARPNESS_UPPER)?;
        if !(den > f64::MIN_POSITIVE) && w != 0.0 {
            return Err(Error::DenominatorUnderflow(r.eps));
        }
        rows.push(SharpnessRow {
            eps: r.eps,
            omega_solid: w,
            denominator: den,
            ratio_lower: ratio(w, den),
            ratio_upper: ratio(w, r.bound_thm2),
            out_of_range: r.eps > 0.25,
        });
    }
    let in_range: Vec<&SharpnessRow> = rows.iter().filter(|r| !r.out_of_range).collect();
    let ext = |f: fn(&SharpnessRow) -> f64| {
        in_range.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(f(r)), hi.max(f(r))))
    };
    let (lower_min, lower_max) = ext(|r| r.ratio_lower);
    let (upper_min, upper_max) = ext(|r| r.ratio_upper);
    Ok(SharpnessTable { rows, lower_min, lower_max, upper_min, upper_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{constant_density, parse_majorant, real_part_density};
    use crate::geometry::build_curve;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_report_is_zero() {
        let c = build_curve("circle:center=-1,radius=1", 256).unwrap();
        let eps = [0.25, 0.125, 0.0625];
        let r = build_bound_report(&c, &constant_density(2.0), &eps, &ReportOptions::default()).unwrap();
        for row in &r.rows {
            assert_eq!(row.omega_solid_plus, 0.0);
            assert_eq!(row.omega_solid_minus, 0.0);
            assert_eq!(row.m_gamma, 0.0);
            assert_eq!(row.bound_thm1, 0.0);
            assert_eq!((row.ratio_thm1, row.ratio_thm2, row.ratio_lower), (0.0, 0.0, 0.0));
        }
        let mu = parse_majorant("power:1").unwrap();
        let s = sharpness_ratios(&r, &mu).unwrap();
        assert!(s.rows.iter().all(|r| r.ratio_lower == 0.0 && r.ratio_upper == 0.0));
    }

    #[test]
    fn csv_layout() {
        let c = build_curve("circle:center=-1,radius=1", 256).unwrap();
        let opts = ReportOptions { sides: vec![DomainSide::Plus], ..Default::default() };
        let r = build_bound_report(&c, &real_part_density(), &[0.5, 0.1], &opts).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# curve="));
        assert_eq!(lines[1], REPORT_HEADER);
        assert!(lines[2].starts_with("# out_of_range=1"));
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[3].split(',').count(), 11);
        assert!(lines[3].split(',').nth(3) == Some("nan"));
        for row in &r.rows {
            assert_abs_diff_eq!(row.bound_thm1, row.bound_thm2 + row.m_gamma, epsilon = 1e-15);
            assert!(row.bound_thm2 <= row.bound_thm1);
        }
        assert!(r.rows[0].omega_curve >= r.rows[1].omega_curve);
    }

    #[test]
    fn majorant_tail_closed_forms() {
        let id = parse_majorant("power:1").unwrap();
        assert_abs_diff_eq!(majorant_tail(&id, 0.25, 4.0).unwrap(), 0.25 * 16f64.ln(), epsilon = 1e-12);
        let pl = parse_majorant("powerlog").unwrap();
        let l = (4.0f64 / 0.01).ln();
        assert_abs_diff_eq!(majorant_tail(&pl, 0.01, 4.0).unwrap(), 0.01 * (l + 0.5 * l * l), epsilon = 1e-12);
    }

    #[test]
    fn spread_rules() {
        assert_eq!(spread([0.0, 0.0]), 1.0);
        assert_eq!(spread([1.0, 4.0, 2.0]), 4.0);
        assert_eq!(spread([0.0, 1.0]), f64::INFINITY);
    }
}
