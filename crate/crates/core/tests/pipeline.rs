use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use num_complex::Complex64;

use layerpot::arg_branch::StieltjesOptions;
use layerpot::densities::{holder_density, parse_majorant, real_part_density, theorem3_density};
use layerpot::geometry::{build_curve, kral_sup};
use layerpot::moduli_bounds::{build_bound_report, sharpness_ratios, ReportOptions, REPORT_HEADER};
use layerpot::potentials::{boundary_values, DomainSide, PotentialField, DEFAULT_TOL};
use layerpot::{kral_variation_sup, parse_density_spec, Error};

#[test]
fn field_is_continuous_across_the_seam() {
    let c = build_curve("ellipse:a=2,b=1", 1024).unwrap();
    let g = parse_density_spec("holder:t0=2+0i,alpha=0.5").unwrap();
    for side in [DomainSide::Plus, DomainSide::Minus] {
        let sign = if side == DomainSide::Plus { -1.0 } else { 1.0 };
        // the diameter is 4, so the default truncation schedule stops too early
        let opts = StieltjesOptions { k_max: 20, ..Default::default() };
        let field = PotentialField::new(c.clone(), g.clone(), side, DEFAULT_TOL).with_stieltjes(opts);
        for k in [0, 100, 256, 700] {
            let b = field.boundary_value(k).unwrap();
            // a Hölder-½ field moves by O(√ρ) over a normal offset ρ
            for rho in [0.04, 0.01] {
                let z = c.point(k) + sign * rho * c.normal(k);
                assert_abs_diff_eq!(field.eval(z).unwrap(), b, epsilon = rho.sqrt());
            }
        }
    }
}

#[test]
fn wrong_side_is_rejected() {
    let c = build_curve("circle:center=-1,radius=1", 256).unwrap();
    let field = PotentialField::new(c, real_part_density(), DomainSide::Plus, DEFAULT_TOL);
    assert!(matches!(field.eval(Complex64::new(3.0, 0.0)), Err(Error::SideMismatch { .. })));
    assert!(matches!(field.cauchy(Complex64::new(0.0, 0.0)), Err(Error::OnCurve { .. })));
    // on the curve `eval` switches to the boundary value
    let on = field.eval(Complex64::new(0.0, 0.0)).unwrap();
    assert_abs_diff_eq!(on, field.boundary_value(0).unwrap(), epsilon = 0.0);
}

#[test]
fn jump_relation_on_a_polygon() {
    let sq = build_curve("polygon:(0,0),(1,0),(1,1),(0,1)", 1024).unwrap();
    let g = parse_density_spec("re").unwrap();
    for k in [0, 128, 256, 600] {
        let b = boundary_values(&sq, &g, k).unwrap();
        assert_abs_diff_eq!(b.plus - b.minus, sq.point(k).re, epsilon = 1e-12);
    }
}

#[test]
fn kral_constants_agree() {
    let sq = build_curve("polygon:(0,0),(1,0),(1,1),(0,1)", 1024).unwrap();
    let v = kral_variation_sup(&sq, 16);
    let k = kral_sup(&sq, 720, 16).unwrap();
    assert_abs_diff_eq!(v.sup, PI, epsilon = 0.01);
    assert!((k.sup - v.sup).abs() / v.sup < 0.02);
}

#[test]
fn report_csv_layout() {
    let c = build_curve("circle:center=-1,radius=1", 512).unwrap();
    let g = holder_density(Complex64::new(0.0, 0.0), 0.5).unwrap();
    let eps = [0.5, 0.25, 0.125];
    let report = build_bound_report(&c, &g, &eps, &ReportOptions::default()).unwrap();
    let csv = report.to_csv();
    let lines: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], REPORT_HEADER);
    assert_eq!(lines.len(), 4);
    assert!(csv.contains("# out_of_range=1 epsilon=5.000000000000e-1"));
    assert_eq!(csv.matches("out_of_range").count(), 1);
    for row in &report.rows {
        assert!(row.omega_solid_plus > 0.0 && row.omega_solid_minus > 0.0);
        assert!(row.bound_thm1 >= row.bound_thm2);
    }
}

#[test]
fn sharpness_table_in_range_rows() {
    let c = build_curve("circle:center=-1,radius=1", 512).unwrap();
    let mu = parse_majorant("power:1").unwrap();
    let g = theorem3_density(mu.clone()).unwrap();
    let opts = ReportOptions { sides: vec![DomainSide::Plus], majorant: Some(mu.clone()), ..Default::default() };
    let report = build_bound_report(&c, &g, &[0.5, 0.25, 0.125], &opts).unwrap();
    let table = sharpness_ratios(&report, &mu).unwrap();
    assert!(table.rows[0].out_of_range);
    assert!(table.lower_min > 0.0);
    assert!(table.lower_spread() < 100.0);
}
