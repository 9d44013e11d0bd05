//! Densities on curves, normal majorants, and the curve modulus `ω_γ(g, ε)`.

mod majorant;
mod modulus;
mod theorem3;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::JordanCurve;
use crate::parse;

pub use majorant::{majorant_ratio_check, make_majorant, parse_majorant, Majorant, MajorantKind, DOMAIN_MAX};
pub use modulus::pair_modulus_table;
pub use theorem3::{theorem3_value, THEOREM3_TOL};

/// A real function on the samples of a fixed curve, evaluable at sample
/// points, segment midpoints (in parameter), and arbitrary parameters.
pub trait CurveFunction: Sync {
    fn at_sample(&self, k: usize) -> f64;
    /// Value at the parameter midpoint of segment `k`.
    fn at_midpoint(&self, k: usize) -> f64;
    fn at_param(&self, theta: f64) -> f64;
}

/// A closure of the position, seen through a curve.
pub struct FnOnCurve<'a, F> {
    curve: &'a JordanCurve,
    f: F,
}

impl<'a, F: Fn(Complex64) -> f64 + Sync> FnOnCurve<'a, F> {
    pub fn new(curve: &'a JordanCurve, f: F) -> Self {
        Self { curve, f }
    }
}

impl<F: Fn(Complex64) -> f64 + Sync> CurveFunction for FnOnCurve<'_, F> {
    fn at_sample(&self, k: usize) -> f64 {
        (self.f)(self.curve.point(k))
    }

    fn at_midpoint(&self, k: usize) -> f64 {
        let (a, b) = self.curve.segment(k);
        (self.f)(self.curve.point_at(0.5 * (a + b)))
    }

    fn at_param(&self, theta: f64) -> f64 {
        (self.f)(self.curve.point_at(theta))
    }
}

type CustomFn = Arc<dyn Fn(Complex64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum DensityKind {
    Constant(f64),
    /// `g(t) = Re t`.
    RealPart,
    /// `g(t) = |t − t0|^α`.
    Holder {
        t0: Complex64,
        alpha: f64,
    },
    Theorem3(Majorant),
    Custom(CustomFn),
}

impl fmt::Debug for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityKind::Constant(c) => write!(f, "Constant({c})"),
            DensityKind::RealPart => write!(f, "RealPart"),
            DensityKind::Holder { t0, alpha } => write!(f, "Holder {{ t0: {t0}, alpha: {alpha} }}"),
            DensityKind::Theorem3(m) => write!(f, "Theorem3({m})"),
            DensityKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// An integral density `g : γ → ℝ` with a cache of measured moduli.
#[derive(Clone)]
pub struct Density {
    kind: DensityKind,
    label: String,
    /// `(curve fingerprint, ε bits) → ω_γ(g, ε)`.
    modulus_cache: Arc<Mutex<BTreeMap<(u64, u64), f64>>>,
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density").field("kind", &self.kind).field("label", &self.label).finish()
    }
}

impl Density {
    fn with_kind(kind: DensityKind, label: String) -> Self {
        Self { kind, label, modulus_cache: Arc::default() }
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `g(t)`. The extremal density falls back to its best quadrature
    /// estimate when the tolerance is not met; see [`Density::try_value`].
    pub fn value(&self, t: Complex64) -> f64 {
        match &self.kind {
            DensityKind::Constant(c) => *c,
            DensityKind::RealPart => t.re,
            DensityKind::Holder { t0, alpha } => (t - t0).norm().powf(*alpha),
            DensityKind::Theorem3(mu) => theorem3::theorem3_estimate(mu, t, THEOREM3_TOL).0,
            DensityKind::Custom(f) => f(t),
        }
    }

    pub fn try_value(&self, t: Complex64) -> Result<f64> {
        match &self.kind {
            DensityKind::Theorem3(mu) => theorem3_value(mu, t),
            _ => Ok(self.value(t)),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, DensityKind::Constant(_))
    }

    /// Points where `g` is not smooth; quadrature is graded towards them.
    pub fn singular_points(&self) -> Vec<Complex64> {
        match &self.kind {
            DensityKind::Holder { t0, .. } => vec![*t0],
            DensityKind::Theorem3(_) => vec![Complex64::new(0.0, 0.0)],
            _ => Vec::new(),
        }
    }

    /// Shape `s(η)` with `ω_γ(g, η) ≍ s(η)` as `η → 0`, when known.
    pub fn small_scale_shape(&self) -> Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>> {
        match &self.kind {
            DensityKind::Constant(_) => Some(Arc::new(|_| 0.0)),
            DensityKind::RealPart => Some(Arc::new(|eta| eta)),
            DensityKind::Holder { alpha, .. } => {
                let a = *alpha;
                Some(Arc::new(move |eta: f64| eta.powf(a)))
            }
            DensityKind::Theorem3(mu) => {
                let mu = mu.clone();
                Some(Arc::new(move |eta| mu.eval(eta)))
            }
            DensityKind::Custom(_) => None,
        }
    }

    /// `ω_γ(g, ε)` over all sample pairs of `curve` at chordal distance `<= ε`.
    pub fn modulus(&self, curve: &JordanCurve, eps: f64) -> f64 {
        self.modulus_table(curve, &[eps])[0]
    }

    /// `ω_γ(g, ε)` for each `ε` of `grid` (any order).
    pub fn modulus_table(&self, curve: &JordanCurve, grid: &[f64]) -> Vec<f64> {
        let fp = curve.fingerprint();
        let key = |e: f64| (fp, e.to_bits());
        {
            let cache = self.modulus_cache.lock().unwrap();
            if let Some(v) = grid.iter().map(|&e| cache.get(&key(e)).copied()).collect::<Option<Vec<_>>>() {
                return v;
            }
        }
        let mut sorted: Vec<f64> = grid.to_vec();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        let values = if self.is_constant() {
            vec![0.0; sorted.len()]
        } else {
            let samples = SampledDensity::new(curve, self);
            pair_modulus_table(curve.points(), samples.values(), &sorted)
        };
        let mut cache = self.modulus_cache.lock().unwrap();
        for (&e, &v) in sorted.iter().zip(&values) {
            cache.entry(key(e)).or_insert(v);
        }
        grid.iter().map(|&e| cache[&key(e)]).collect()
    }

    /// Largest `|g|` over the samples of `curve`.
    pub fn sup_abs(&self, curve: &JordanCurve) -> f64 {
        SampledDensity::new(curve, self).values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn constant_density(c: f64) -> Density {
    Density::with_kind(DensityKind::Constant(c), format!("const:{c}"))
}

pub fn real_part_density() -> Density {
    Density::with_kind(DensityKind::RealPart, "re".into())
}

/// `g(t) = |t − t0|^α` with `α ∈ (0, 1]`.
pub fn holder_density(t0: Complex64, alpha: f64) -> Result<Density> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    Ok(Density::with_kind(DensityKind::Holder { t0, alpha }, format!("holder:t0={t0},alpha={alpha}")))
}

/// The extremal density for `μ` on `|t + 1| = 1`.
pub fn theorem3_density(mu: Majorant) -> Result<Density> {
    if mu.k() != 1.0 {
        return Err(Error::ClassMismatch(mu.k()));
    }
    let tiny = mu.eval(DOMAIN_MAX * 0.5f64.powi(40));
    if !(tiny <= 1e-6 * mu.eval(1.0)) {
        return Err(Error::InvalidArgument("majorant must vanish at 0".into()));
    }
    let label = format!("thm3:mu={mu}");
    Ok(Density::with_kind(DensityKind::Theorem3(mu), label))
}

pub fn custom_density<F>(label: &str, f: F) -> Density
where
    F: Fn(Complex64) -> f64 + Send + Sync + 'static,
{
    Density::with_kind(DensityKind::Custom(Arc::new(f)), label.to_string())
}

/// Parses `const:<v>`, `re`, `holder:t0=<point>,alpha=<a>`,
/// `thm3:mu=power:<alpha>` or `thm3:mu=powerlog`.
pub fn parse_density_spec(spec: &str) -> Result<Density> {
    let s = parse::normalize(spec);
    let bad = |reason: &str| Error::DensitySpec { spec: spec.to_string(), reason: reason.to_string() };
    if s == "re" {
        return Ok(real_part_density());
    }
    let (family, body) = s.split_once(':').ok_or_else(|| bad("unknown density"))?;
    match family {
        "const" => parse::real(body).map(constant_density).ok_or_else(|| bad("bad constant")),
        "holder" => {
            let kv = parse::key_values(body).ok_or_else(|| bad("expected key=value list"))?;
            let (mut t0, mut alpha) = (None, None);
            for (k, v) in kv {
                match k.as_str() {
                    "t0" if t0.is_none() => t0 = Some(parse::complex(&v).ok_or_else(|| bad("bad t0"))?),
                    "alpha" if alpha.is_none() => alpha = Some(parse::real(&v).ok_or_else(|| bad("bad alpha"))?),
                    _ => return Err(bad(&format!("unexpected key `{k}`"))),
                }
            }
            let (t0, alpha) = (t0.ok_or_else(|| bad("missing t0"))?, alpha.ok_or_else(|| bad("missing alpha"))?);
            holder_density(t0, alpha).map_err(|e| bad(&e.to_string()))
        }
        "thm3" => {
            let mu = body.strip_prefix("mu=").ok_or_else(|| bad("expected `mu=`"))?;
            theorem3_density(parse_majorant(mu)?)
        }
        _ => Err(bad(&format!("unknown family `{family}`"))),
    }
}

/// Density values at the samples and segment midpoints of one curve.
pub struct SampledDensity<'a> {
    curve: &'a JordanCurve,
    density: &'a Density,
    samples: Vec<f64>,
    mids: Vec<f64>,
}

impl<'a> SampledDensity<'a> {
    pub fn new(curve: &'a JordanCurve, density: &'a Density) -> Self {
        let n = curve.len();
        let samples = (0..n).into_par_iter().map(|k| density.value(curve.point(k))).collect();
        let mids = (0..n)
            .into_par_iter()
            .map(|k| {
                let (a, b) = curve.segment(k);
                density.value(curve.point_at(0.5 * (a + b)))
            })
            .collect();
        Self { curve, density, samples, mids }
    }

    pub fn values(&self) -> &[f64] {
        &self.samples
    }

    pub fn density(&self) -> &Density {
        self.density
    }
}

impl CurveFunction for SampledDensity<'_> {
    fn at_sample(&self, k: usize) -> f64 {
        self.samples[k % self.samples.len()]
    }

    fn at_midpoint(&self, k: usize) -> f64 {
        self.mids[k % self.mids.len()]
    }

    fn at_param(&self, theta: f64) -> f64 {
        self.density.value(self.curve.point_at(theta))
    }
}
