//! The Cauchy-type integral `g̃(z) = (1/2πi)∮ g(t)/(t − z) dt`, the
//! logarithmic double layer potential `Re g̃`, their boundary values from
//! the arg-Stieltjes integral, and the functional `M_γ(g, ε)`.

mod plan;

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arg_branch::{annulus_integral, stieltjes_limit_on, ArgBranch, StieltjesOptions};
use crate::densities::{CurveFunction, Density, SampledDensity};
use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, JordanCurve, Location, Portions};

pub use plan::{QuadraturePlan, MAX_REFINEMENT};

/// Default absolute tolerance of field quadrature.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default number of truncation radii `ε·2^{−j}`, `j = 1..J`, in `M_γ`.
pub const M_GAMMA_LEVELS: u32 = 10;

/// The two complementary domains of the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainSide {
    /// The bounded domain `D⁺`.
    Plus,
    /// The unbounded domain `D⁻`.
    Minus,
}

impl DomainSide {
    pub fn name(self) -> &'static str {
        match self {
            DomainSide::Plus => "plus",
            DomainSide::Minus => "minus",
        }
    }
}

impl fmt::Display for DomainSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_off_curve(curve: &JordanCurve, z: Complex64) -> Result<()> {
    if curve.distance(z) < 0.5 * curve.spacing() {
        return Err(Error::OnCurve { re: z.re, im: z.im });
    }
    Ok(())
}

fn cauchy_with(plan: &QuadraturePlan, curve: &JordanCurve, g: &Density, z: Complex64) -> Result<Complex64> {
    let s = plan.integrate(curve, g, z, |t, dt, gv| gv * dt / (t - z))?;
    Ok(s / Complex64::new(0.0, TAU))
}

fn double_layer_with(plan: &QuadraturePlan, curve: &JordanCurve, g: &Density, z: Complex64) -> Result<f64> {
    // (t − z)·n ds with n ds = −i dt
    let s = plan.integrate(curve, g, z, |t, dt, gv| {
        let r = t - z;
        let n_ds = -Complex64::i() * dt;
        Complex64::new(gv * (r.re * n_ds.re + r.im * n_ds.im) / r.norm_sqr(), 0.0)
    })?;
    Ok(s.re / TAU)
}

/// `g̃(z)` for `z` off the curve.
pub fn cauchy_integral(curve: &JordanCurve, g: &Density, z: Complex64) -> Result<Complex64> {
    check_off_curve(curve, z)?;
    let plan = QuadraturePlan::new(curve, g, DEFAULT_TOL)?;
    cauchy_with(&plan, curve, g, z)
}

/// `(1/2π)∮ g(t) ∂/∂n ln(1/|t − z|) ds` with the normal pointing into `D⁺`,
/// so that a unit density gives 1 in `D⁺` and 0 in `D⁻`.
pub fn double_layer(curve: &JordanCurve, g: &Density, z: Complex64) -> Result<f64> {
    check_off_curve(curve, z)?;
    let plan = QuadraturePlan::new(curve, g, DEFAULT_TOL)?;
    double_layer_with(&plan, curve, g, z)
}

/// Boundary values of `Re g̃` at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryValues {
    pub g: f64,
    /// `∫_γ (g(t) − g(ξ)) d arg(t − ξ)`.
    pub stieltjes: f64,
    pub plus: f64,
    pub minus: f64,
}

impl BoundaryValues {
    fn new(g: f64, stieltjes: f64) -> Self {
        let minus = stieltjes / TAU;
        Self { g, stieltjes, plus: g + minus, minus }
    }

    pub fn on(&self, side: DomainSide) -> f64 {
        match side {
            DomainSide::Plus => self.plus,
            DomainSide::Minus => self.minus,
        }
    }
}

fn boundary_at(
    curve: &JordanCurve,
    g: &dyn CurveFunction,
    xi: usize,
    opts: &StieltjesOptions,
) -> Result<BoundaryValues> {
    let branch = ArgBranch::new(curve, xi);
    let lim = stieltjes_limit_on(&branch, curve, g, opts)?;
    Ok(BoundaryValues::new(g.at_sample(xi), lim.value))
}

/// `(Re g̃)^±(ξ)` at sample `xi` for the chosen side.
pub fn boundary_value(curve: &JordanCurve, g: &Density, xi: usize, side: DomainSide) -> Result<f64> {
    Ok(boundary_values(curve, g, xi)?.on(side))
}

pub fn boundary_values(curve: &JordanCurve, g: &Density, xi: usize) -> Result<BoundaryValues> {
    let samples = SampledDensity::new(curve, g);
    boundary_at(curve, &samples, xi, &StieltjesOptions::default())
}

/// Boundary values at the given samples, sharing one density table.
pub fn boundary_values_at(
    curve: &JordanCurve,
    g: &Density,
    xis: &[usize],
    opts: &StieltjesOptions,
) -> Vec<Result<BoundaryValues>> {
    let samples = SampledDensity::new(curve, g);
    xis.par_iter().map(|&x| boundary_at(curve, &samples, x, opts)).collect()
}

/// `M_γ(g, ε)` with its maximizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MGamma {
    pub eps: f64,
    pub value: f64,
    pub argmax: usize,
    pub delta: f64,
}

/// `sup_ξ sup_δ |∫_{γ_ε(ξ)∖γ_δ(ξ)} (g(t) − g(ξ)) d arg(t − ξ)|` over all
/// samples and `δ = ε·2^{−j}`, `j = 1..levels`.
pub fn m_gamma(curve: &JordanCurve, g: &Density, eps: f64) -> Result<f64> {
    Ok(m_gamma_table(curve, g, &[eps], M_GAMMA_LEVELS)?[0].value)
}

pub fn m_gamma_table(curve: &JordanCurve, g: &Density, eps_grid: &[f64], levels: u32) -> Result<Vec<MGamma>> {
    if let Some(&e) = eps_grid.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {e}")));
    }
    if g.is_constant() {
        return Ok(eps_grid.iter().map(|&eps| MGamma { eps, value: 0.0, argmax: 0, delta: eps / 2.0 }).collect());
    }
    let samples = SampledDensity::new(curve, g);
    Ok(eps_grid.iter().map(|&eps| m_gamma_sampled(curve, &samples, eps, levels)).collect())
}

pub(crate) fn m_gamma_sampled(curve: &JordanCurve, g: &dyn CurveFunction, eps: f64, levels: u32) -> MGamma {
    let n = curve.len();
    let best = (0..n)
        .into_par_iter()
        .map(|xi| {
            let base = curve.point(xi);
            let segs: Vec<usize> = (0..n)
                .filter(|&k| {
                    let (pa, pb) = (curve.point(k), curve.point(k + 1));
                    point_segment_distance(base, pa, pb) <= eps + 0.5 * (pb - pa).norm()
                })
                .collect();
            let shift = g.at_sample(xi);
            let mut buf = Portions::new();
            let mut best = (0.0f64, eps / 2.0);
            for j in 1..=levels {
                let delta = eps * 0.5f64.powi(j as i32);
                let v = annulus_integral(curve, xi, g, shift, delta, eps, &segs, &mut buf).abs();
                if v > best.0 {
                    best = (v, delta);
                }
            }
            (best.0, xi, best.1)
        })
        .reduce(|| (0.0, 0, eps / 2.0), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    MGamma { eps, value: best.0, argmax: best.1, delta: best.2 }
}

/// `Re g̃` on the closure of one side, with boundary values from the
/// arg-Stieltjes integral.
pub struct PotentialField {
    curve: JordanCurve,
    density: Density,
    side: DomainSide,
    tol: f64,
    stieltjes: StieltjesOptions,
    plan: OnceLock<std::result::Result<QuadraturePlan, Error>>,
    boundary: OnceLock<Vec<Result<BoundaryValues>>>,
    cache: Mutex<HashMap<(u64, u64), f64>>,
}

impl fmt::Debug for PotentialField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialField")
            .field("curve", &self.curve.spec())
            .field("density", &self.density.label())
            .field("side", &self.side)
            .field("tol", &self.tol)
            .finish()
    }
}

pub fn potential_field(curve: &JordanCurve, g: &Density, side: DomainSide) -> PotentialField {
    PotentialField::new(curve.clone(), g.clone(), side, DEFAULT_TOL)
}

pub fn field_eval(field: &PotentialField, z: Complex64) -> Result<f64> {
    field.eval(z)
}

impl PotentialField {
    pub fn new(curve: JordanCurve, density: Density, side: DomainSide, tol: f64) -> Self {
        Self {
            curve,
            density,
            side,
            tol,
            stieltjes: StieltjesOptions::default(),
            plan: OnceLock::new(),
            boundary: OnceLock::new(),
            cache: Mutex::default(),
        }
    }

    pub fn with_stieltjes(mut self, opts: StieltjesOptions) -> Self {
        self.stieltjes = opts;
        self
    }

    pub fn curve(&self) -> &JordanCurve {
        &self.curve
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn side(&self) -> DomainSide {
        self.side
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn plan(&self) -> Result<&QuadraturePlan> {
        self.plan
            .get_or_init(|| QuadraturePlan::new(&self.curve, &self.density, self.tol))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Boundary values at every sample, computed once.
    pub fn boundary_table(&self) -> &[Result<BoundaryValues>] {
        self.boundary.get_or_init(|| {
            let xs: Vec<usize> = (0..self.curve.len()).collect();
            boundary_values_at(&self.curve, &self.density, &xs, &self.stieltjes)
        })
    }

    pub fn boundary_value(&self, xi: usize) -> Result<f64> {
        self.boundary_table()[xi % self.curve.len()].clone().map(|b| b.on(self.side))
    }

    /// `g̃(z)` for `z` off the curve (either side).
    pub fn cauchy(&self, z: Complex64) -> Result<Complex64> {
        check_off_curve(&self.curve, z)?;
        cauchy_with(self.plan()?, &self.curve, &self.density, z)
    }

    pub fn double_layer(&self, z: Complex64) -> Result<f64> {
        check_off_curve(&self.curve, z)?;
        double_layer_with(self.plan()?, &self.curve, &self.density, z)
    }

    /// `Re g̃(z)` in the open side, the boundary value on the curve.
    pub fn eval(&self, z: Complex64) -> Result<f64> {
        match self.curve.locate(z) {
            Location::Boundary(k) => self.boundary_value(k),
            loc => {
                let inside = loc == Location::Interior;
                if inside != (self.side == DomainSide::Plus) {
                    return Err(Error::SideMismatch { re: z.re, im: z.im, side: self.side.name() });
                }
                self.eval_open(z)
            }
        }
    }

    /// `Re g̃(z)` for a point already known to lie in the open side.
    pub(crate) fn eval_open(&self, z: Complex64) -> Result<f64> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(&v) = self.cache.lock().unwrap().get(&key) {
            return Ok(v);
        }
        let v = if self.density.is_constant() {
            let c = self.density.value(z);
            if self.side == DomainSide::Plus {
                c
            } else {
                0.0
            }
        } else {
            cauchy_with(self.plan()?, &self.curve, &self.density, z)?.re
        };
        self.cache.lock().unwrap().insert(key, v);
        Ok(v)
    }
}

/// Sanity bound for the exterior decay: `sup|g|·L / (2π·dist)`.
pub fn exterior_decay_bound(curve: &JordanCurve, g: &Density, z: Complex64) -> f64 {
    g.sup_abs(curve) * curve.total_length() / (TAU * curve.distance(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{constant_density, holder_density, real_part_density};
    use crate::geometry::build_curve;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn circle(n: usize) -> JordanCurve {
        build_curve("circle:center=-1,radius=1", n).unwrap()
    }

    fn interior_oracle(z: Complex64) -> Complex64 {
        (z - 1.0) / 2.0
    }

    fn exterior_oracle(z: Complex64) -> Complex64 {
        -1.0 / (2.0 * (z + 1.0))
    }

    #[test]
    fn constant_density_cauchy() {
        let c = circle(256);
        let one = constant_density(1.0);
        let inside = cauchy_integral(&c, &one, Complex64::new(-1.2, 0.3)).unwrap();
        assert_abs_diff_eq!(inside.re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(inside.im, 0.0, epsilon = 1e-10);
        let outside = cauchy_integral(&c, &one, Complex64::new(0.5, 1.0)).unwrap();
        assert!(outside.norm() < 1e-10);
        assert_abs_diff_eq!(double_layer(&c, &one, Complex64::new(-1.2, 0.3)).unwrap(), 1.0, epsilon = 1e-8);
        assert!(double_layer(&c, &one, Complex64::new(3.0, 0.0)).unwrap().abs() < 1e-8);
    }

    #[test]
    fn real_part_residue_oracle() {
        let c = circle(256);
        let re = real_part_density();
        for z in [Complex64::new(-1.0, 0.0), Complex64::new(-1.3, 0.5), Complex64::new(-0.04, 0.0)] {
            let v = cauchy_integral(&c, &re, z).unwrap();
            assert!((v - interior_oracle(z)).norm() < 1e-8, "{z}");
        }
        for z in [Complex64::new(0.03, 0.0), Complex64::new(-1.0, 3.0), Complex64::new(2.0, -1.0)] {
            let v = cauchy_integral(&c, &re, z).unwrap();
            assert!((v - exterior_oracle(z)).norm() < 1e-8, "{z}");
        }
        assert_abs_diff_eq!(double_layer(&c, &re, Complex64::new(-1.0, 0.0)).unwrap(), -1.0, epsilon = 1e-6);
    }

    #[test]
    fn rejects_points_on_curve() {
        let c = circle(256);
        let r = cauchy_integral(&c, &real_part_density(), Complex64::new(0.0, 0.0));
        assert!(matches!(r, Err(Error::OnCurve { .. })));
    }

    #[test]
    fn boundary_value_examples() {
        let c = circle(4096);
        let k = constant_density(2.5);
        let b = boundary_values(&c, &k, 100).unwrap();
        assert_eq!((b.plus, b.minus), (2.5, 0.0));
        let re = real_part_density();
        let b = boundary_values(&c, &re, 0).unwrap();
        assert_abs_diff_eq!(b.plus, -0.5, epsilon = 1e-3);
        assert_abs_diff_eq!(b.minus, -0.5, epsilon = 1e-3);
        assert!((b.plus - b.minus - b.g).abs() <= 1e-12);
    }

    #[test]
    fn boundary_matches_residue_everywhere() {
        let c = circle(2048);
        let re = real_part_density();
        let xs: Vec<usize> = (0..2048).step_by(97).collect();
        for (x, b) in xs.iter().zip(boundary_values_at(&c, &re, &xs, &StieltjesOptions::default())) {
            let b = b.unwrap();
            let xi = c.point(*x);
            assert_abs_diff_eq!(b.plus, interior_oracle(xi).re, epsilon = 1e-3);
            assert_abs_diff_eq!(b.minus, exterior_oracle(xi).re, epsilon = 1e-3);
        }
    }

    #[test]
    fn field_examples() {
        let c = circle(512);
        let one = potential_field(&c, &constant_density(1.0), DomainSide::Plus);
        assert_eq!(field_eval(&one, Complex64::new(-1.0, 0.5)).unwrap(), 1.0);
        let re_plus = potential_field(&c, &real_part_density(), DomainSide::Plus);
        assert_abs_diff_eq!(re_plus.eval(Complex64::new(-1.0, 0.5)).unwrap(), -1.0, epsilon = 1e-6);
        let re_minus = potential_field(&c, &real_part_density(), DomainSide::Minus);
        assert!(re_minus.eval(Complex64::new(-1.0, 3.0)).unwrap().abs() < 1e-8);
        assert!(matches!(re_minus.eval(Complex64::new(-1.0, 0.5)), Err(Error::SideMismatch { .. })));
        assert!(matches!(re_plus.eval(Complex64::new(-1.0, 3.0)), Err(Error::SideMismatch { .. })));
    }

    #[test]
    fn near_boundary_accuracy() {
        let c = circle(512);
        let re = real_part_density();
        let field = potential_field(&c, &re, DomainSide::Plus);
        for rho in [1e-1, 1e-2, 7e-3] {
            let z = Complex64::new(-1.0, 0.0) + Complex64::from_polar(1.0 - rho, 0.7);
            assert_abs_diff_eq!(field.eval(z).unwrap(), interior_oracle(z).re, epsilon = 1e-9);
        }
    }

    #[test]
    fn holder_density_near_its_singularity() {
        // |t|^{1/2} on the circle through 0; compare with a much finer curve
        let g = holder_density(Complex64::new(0.0, 0.0), 0.5).unwrap();
        let coarse = potential_field(&circle(256), &g, DomainSide::Plus);
        let fine = potential_field(&circle(2048), &g, DomainSide::Plus);
        for z in [Complex64::new(-0.05, 0.0), Complex64::new(-0.5, 0.5)] {
            assert_abs_diff_eq!(coarse.eval(z).unwrap(), fine.eval(z).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn m_gamma_of_constant_is_zero() {
        let c = circle(256);
        assert_eq!(m_gamma(&c, &constant_density(4.0), 0.3).unwrap(), 0.0);
        assert!(m_gamma(&c, &real_part_density(), 0.0).is_err());
    }

    #[test]
    fn m_gamma_real_part_oracle() {
        // on the circle d arg = dθ/2: (1/2)|∫ (cos θ − cos θ_ξ) dθ| over the
        // admissible arcs δ < 2|sin(θ/2)| <= ε on both sides of θ_ξ
        let n = 1024;
        let c = circle(n);
        let eps = 0.5;
        let got = m_gamma(&c, &real_part_density(), eps).unwrap();
        let mut oracle = 0.0f64;
        for xi in 0..n {
            let th = TAU * xi as f64 / n as f64;
            for j in 1..=M_GAMMA_LEVELS {
                let delta = eps * 0.5f64.powi(j as i32);
                let (lo, hi) = (2.0 * (delta / 2.0f64).asin(), 2.0 * (eps / 2.0f64).asin());
                // ∫_{lo}^{hi} (cos(θ+s) + cos(θ−s) − 2cos θ) ds / 2
                let v = 0.5 * (2.0 * th.cos() * (hi.sin() - lo.sin()) - 2.0 * th.cos() * (hi - lo));
                oracle = oracle.max(v.abs());
            }
        }
        assert_abs_diff_eq!(got, oracle, epsilon = 1e-4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn double_layer_is_real_part(x in -3.0f64..1.0, y in -2.0f64..2.0) {
            let c = build_curve("ellipse:a=1.5,b=0.8,center=-1", 256).unwrap();
            let z = Complex64::new(x, y);
            prop_assume!(c.distance(z) > c.spacing());
            let g = holder_density(Complex64::new(-2.5, 0.0), 0.5).unwrap();
            let field = PotentialField::new(c, g, DomainSide::Plus, DEFAULT_TOL);
            let dl = field.double_layer(z).unwrap();
            let re = field.cauchy(z).unwrap().re;
            prop_assert!((dl - re).abs() <= 10.0 * DEFAULT_TOL);
        }
    }
}
