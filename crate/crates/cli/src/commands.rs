use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;

use layerpot::arg_branch::{arg_variation, StieltjesOptions};
use layerpot::densities::{parse_density_spec, DensityKind};
use layerpot::geometry::{ahlfors_csv, ahlfors_report, build_curve, kral_integral, JordanCurve, Location};
use layerpot::moduli_bounds::{build_bound_report, majorant_tail, sharpness_ratios, ReportOptions, SHARPNESS_UPPER};
use layerpot::potentials::{boundary_values_at, DomainSide, PotentialField};
use layerpot::quadrature::adaptive_simpson;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{loglog_svg, with_hash, write_atomic, Series};

/// Largest admissible `|plus − minus − g(ξ)|`.
pub const JUMP_TOL: f64 = 1e-8;
/// Largest admissible relative gap between the Král integral and the arg variation.
pub const INDICATRIX_TOL: f64 = 0.02;
/// Largest admissible max/min spread of the upper-bound ratios.
pub const UPPER_SPREAD_MAX: f64 = 10.0;
/// Largest admissible max/min spread of the sharpness ratios.
pub const LOWER_SPREAD_MAX: f64 = 100.0;

/// Files written and a one-line summary; `failure` is set when an invariant
/// check failed after the outputs were written.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub failure: Option<String>,
}

impl Outcome {
    fn finish(self) -> Result<Outcome, CliError> {
        match &self.failure {
            Some(f) => Err(CliError::Invariant(format!("{f} (outputs: {})", self.list_files()))),
            None => Ok(self),
        }
    }

    pub fn list_files(&self) -> String {
        self.files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")
    }

    fn write(&mut self, cfg: &ExperimentConfig, name: &str, contents: &str) -> Result<(), CliError> {
        self.files.push(write_atomic(&cfg.out_dir, name, contents)?);
        Ok(())
    }
}

fn curve(cfg: &ExperimentConfig) -> Result<JordanCurve, CliError> {
    Ok(build_curve(&cfg.curve, cfg.samples)?)
}

fn base_points(curve: &JordanCurve, count: usize) -> Vec<usize> {
    let stride = (curve.len() / count).max(1);
    (0..curve.len()).step_by(stride).collect()
}

pub fn geometry(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let c = curve(cfg)?;
    let hash = cfg.hash();
    let mut eps = cfg.eps_grid(c.diameter() / 8.0);
    eps.reverse();
    let ahlfors = ahlfors_report(&c, &eps)?;

    let mut body = String::from("sample,param,re_xi,im_xi,arg_variation,kral_integral,residual\n");
    let (mut worst, mut kral_sup, mut var_sup) = (0.0f64, 0.0f64, 0.0f64);
    for x in base_points(&c, cfg.points) {
        let v = arg_variation(&c, x);
        let k = kral_integral(&c, x, cfg.angles)?;
        let residual = (k - v).abs() / v;
        worst = worst.max(residual);
        kral_sup = kral_sup.max(k);
        var_sup = var_sup.max(v);
        let xi = c.point(x);
        writeln!(body, "{x},{},{},{},{v},{k},{residual}", c.param(x), xi.re, xi.im).unwrap();
    }
    let mut out = Outcome::default();
    out.write(cfg, &format!("geometry-{hash}.csv"), &with_hash(&hash, &body))?;
    out.write(cfg, &format!("ahlfors-{hash}.csv"), &with_hash(&hash, &ahlfors_csv(&ahlfors)))?;
    let series = vec![
        Series { name: "theta".into(), points: ahlfors.iter().map(|r| (r.eps, r.theta)).collect() },
        Series { name: "theta / eps".into(), points: ahlfors.iter().map(|r| (r.eps, r.ratio)).collect() },
    ];
    out.write(cfg, &format!("geometry-{hash}.svg"), &loglog_svg(&cfg.curve, "epsilon", &series))?;
    let theta_max = ahlfors.iter().map(|r| r.ratio).fold(0.0, f64::max);
    out.summary = format!(
        "kral_sup={kral_sup:.6} variation_sup={var_sup:.6} max_residual={worst:.3e} max_theta_ratio={theta_max:.4}"
    );
    if !(worst <= INDICATRIX_TOL) {
        out.failure = Some(format!("indicatrix residual {worst:.3e} exceeds {INDICATRIX_TOL}"));
    } else if !theta_max.is_finite() {
        out.failure = Some("Ahlfors ratio is not finite".into());
    }
    out.finish()
}

pub fn jump_test(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let c = curve(cfg)?;
    let g = parse_density_spec(&cfg.density)?;
    let hash = cfg.hash();
    let xs = base_points(&c, cfg.points);
    let values = boundary_values_at(&c, &g, &xs, &StieltjesOptions::default());
    let mut body = String::from("xi,plus,minus,jump_residual\n");
    let mut worst = 0.0f64;
    for (&x, v) in xs.iter().zip(values) {
        let b = v.map_err(|e| {
            let xi = c.point(x);
            CliError::NonConvergence(format!("at sample {x} (xi = {}{:+}i): {e}", xi.re, xi.im))
        })?;
        let residual = b.plus - b.minus - b.g;
        worst = worst.max(residual.abs());
        writeln!(body, "{},{},{},{residual}", c.param(x), b.plus, b.minus).unwrap();
    }
    let mut out = Outcome::default();
    out.write(cfg, &format!("jump-test-{hash}.csv"), &with_hash(&hash, &body))?;
    out.summary = format!("points={} max_jump_residual={worst:.3e}", xs.len());
    if !(worst <= JUMP_TOL) {
        out.failure = Some(format!("jump residual {worst:.3e} exceeds {JUMP_TOL:e}"));
    }
    out.finish()
}

pub fn zygmund_check(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let c = curve(cfg)?;
    let g = parse_density_spec(&cfg.density)?;
    let hash = cfg.hash();
    let eps = cfg.eps_grid(c.diameter() / 8.0);
    let opts = ReportOptions { sides: cfg.side.sides(), tol: cfg.tol, ..Default::default() };
    let report = build_bound_report(&c, &g, &eps, &opts)?;
    let mut out = Outcome::default();
    out.write(cfg, &format!("zygmund-check-{hash}.csv"), &with_hash(&hash, &report.to_csv()))?;
    let col = |f: fn(&layerpot::moduli_bounds::BoundRow) -> f64| report.rows.iter().map(|r| (r.eps, f(r))).collect();
    let series = vec![
        Series { name: "omega_solid".into(), points: col(|r| r.omega_solid()) },
        Series { name: "omega_curve".into(), points: col(|r| r.omega_curve) },
        Series { name: "m_gamma".into(), points: col(|r| r.m_gamma) },
        Series { name: "bound_thm1".into(), points: col(|r| r.bound_thm1) },
        Series { name: "bound_thm2".into(), points: col(|r| r.bound_thm2) },
        Series { name: "bound_zygmund".into(), points: col(|r| r.bound_zygmund) },
    ];
    let title = format!("{} on {}", cfg.density, cfg.curve);
    out.write(cfg, &format!("zygmund-check-{hash}.svg"), &loglog_svg(&title, "epsilon", &series))?;
    let (s1, s2) = report.ratio_spreads();
    out.summary = format!("rows={} spread_thm1={s1:.4} spread_thm2={s2:.4}", report.rows.len());
    if !(s1 <= UPPER_SPREAD_MAX && s2 <= UPPER_SPREAD_MAX) {
        out.failure = Some(format!("ratio spreads {s1:.3}, {s2:.3} exceed {UPPER_SPREAD_MAX}"));
    }
    out.finish()
}

pub fn sharpness(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let c = curve(cfg)?;
    let g = parse_density_spec(&cfg.density)?;
    let DensityKind::Theorem3(mu) = g.kind().clone() else {
        return Err(CliError::Config(format!("sharpness needs a thm3 density, got `{}`", cfg.density)));
    };
    let hash = cfg.hash();
    let eps = cfg.eps_grid(0.25);
    // the tail denominator is cross-checked against quadrature in ln η
    for &e in &eps {
        let closed = majorant_tail(&mu, e, SHARPNESS_UPPER)?;
        let f = |u: f64| mu.eval(u.exp()) * (-u).exp();
        let numeric = e * adaptive_simpson(&f, e.ln(), SHARPNESS_UPPER.ln(), 1e-12)?;
        if (closed - numeric).abs() > 1e-8 * closed.abs().max(1e-300) + 1e-14 {
            return Err(CliError::Invariant(format!(
                "tail integral at eps={e}: closed form {closed} vs quadrature {numeric}"
            )));
        }
    }
    let opts =
        ReportOptions { sides: cfg.side.sides(), tol: cfg.tol, majorant: Some(mu.clone()), ..Default::default() };
    let report = build_bound_report(&c, &g, &eps, &opts)?;
    let table = sharpness_ratios(&report, &mu)?;
    let mut out = Outcome::default();
    out.write(cfg, &format!("sharpness-{hash}.csv"), &with_hash(&hash, &table.to_csv()))?;
    let series = vec![
        Series { name: "omega_solid".into(), points: table.rows.iter().map(|r| (r.eps, r.omega_solid)).collect() },
        Series {
            name: "lower denominator".into(),
            points: table.rows.iter().map(|r| (r.eps, r.denominator)).collect(),
        },
        Series { name: "ratio_lower".into(), points: table.rows.iter().map(|r| (r.eps, r.ratio_lower)).collect() },
        Series { name: "ratio_upper".into(), points: table.rows.iter().map(|r| (r.eps, r.ratio_upper)).collect() },
    ];
    let title = format!("{} on {}", cfg.density, cfg.curve);
    out.write(cfg, &format!("sharpness-{hash}.svg"), &loglog_svg(&title, "epsilon", &series))?;
    let spread = table.lower_spread();
    out.summary = format!(
        "min_ratio_lower={:.4} max_ratio_lower={:.4} spread={spread:.4} ratio_upper=[{:.4}, {:.4}]",
        table.lower_min, table.lower_max, table.upper_min, table.upper_max
    );
    if !(table.lower_min > 0.0 && spread <= LOWER_SPREAD_MAX) {
        out.failure = Some(format!(
            "lower ratios min {:.3e}, spread {spread:.3} (need > 0 and <= {LOWER_SPREAD_MAX})",
            table.lower_min
        ));
    }
    out.finish()
}

/// Evaluates `Re g̃` on a square lattice around the curve, one CSV per side.
/// Values must obey the maximum principle with respect to the sampled
/// boundary values (and `0` at infinity on the exterior side).
pub fn potential_scan(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let c = curve(cfg)?;
    let g = parse_density_spec(&cfg.density)?;
    let hash = cfg.hash();
    let (mut lo, mut hi) =
        (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in c.points() {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let pad = 0.25 * c.diameter();
    let (lo, hi) = (lo - Complex64::new(pad, pad), hi + Complex64::new(pad, pad));
    let n = cfg.grid;
    let lattice: Vec<Complex64> = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .map(|(i, j)| {
            let (s, t) = (i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64);
            Complex64::new(lo.re + s * (hi.re - lo.re), lo.im + t * (hi.im - lo.im))
        })
        .collect();
    let mut out = Outcome::default();
    let mut summary = Vec::new();
    for side in cfg.side.sides() {
        let field = PotentialField::new(c.clone(), g.clone(), side, cfg.tol);
        let boundary: Vec<f64> =
            field.boundary_table().iter().map(|b| b.clone().map(|b| b.on(side))).collect::<Result<_, _>>()?;
        let (mut bmin, mut bmax) =
            boundary.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if side == DomainSide::Minus {
            bmin = bmin.min(0.0);
            bmax = bmax.max(0.0);
        }
        let slack = 1e-6 * (bmax - bmin).abs().max(1.0);
        let mut body = String::from("re_z,im_z,value\n");
        let (mut count, mut violations) = (0usize, 0usize);
        for &z in &lattice {
            let inside = match c.locate(z) {
                Location::Interior => true,
                Location::Exterior => false,
                Location::Boundary(_) => side == DomainSide::Plus,
            };
            if inside != (side == DomainSide::Plus) && !matches!(c.locate(z), Location::Boundary(_)) {
                continue;
            }
            let v = field.eval(z)?;
            if v < bmin - slack || v > bmax + slack {
                violations += 1;
            }
            count += 1;
            writeln!(body, "{},{},{v}", z.re, z.im).unwrap();
        }
        out.write(cfg, &format!("potential-scan-{}-{hash}.csv", side.name()), &with_hash(&hash, &body))?;
        summary.push(format!("{}: points={count} range=[{bmin:.6}, {bmax:.6}] violations={violations}", side.name()));
        if violations > 0 {
            out.failure = Some(format!("{violations} {} values outside the boundary range", side.name()));
        }
    }
    out.summary = summary.join("; ");
    out.finish()
}
