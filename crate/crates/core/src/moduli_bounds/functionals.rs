//! The bound functionals
//!
//! ```text
//! thm2(ε)    = ε ∫_ε^{2d} ω(η)/η² dη
//! thm1(ε)    = M_γ(g, ε) + thm2(ε)
//! zygmund(ε) = ∫_0^ε ω(η)/η dη + thm2(ε)
//! ```
//!
//! and the Dini integral, for moduli given in closed form or as tables.

use std::fmt;
use std::sync::Arc;

use crate::densities::Majorant;
use crate::error::{Error, Result};
use crate::quadrature::{gauss8, log_nodes};

/// Nodes per decade of the log-trapezoid rule for `∫ ω/η²`.
pub const NODES_PER_DECADE: usize = 64;

/// Dyadic blocks summed by the Dini integral before extrapolating the tail.
const DINI_MAX_BLOCKS: usize = 1000;

/// Block ratio above which a non-vanishing tail is reported as divergent.
const DINI_DIVERGENT_RATIO: f64 = 0.995;

type ShapeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A measured modulus on `[eta[0], eta[last]]` with an optional small-scale
/// shape used to extend it towards zero.
#[derive(Clone)]
pub struct ModulusTable {
    eta: Vec<f64>,
    omega: Vec<f64>,
    small: Option<ShapeFn>,
}

impl fmt::Debug for ModulusTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModulusTable")
            .field("eta", &self.eta)
            .field("omega", &self.omega)
            .field("extendable", &self.small.is_some())
            .finish()
    }
}

impl ModulusTable {
    pub fn new(eta: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        if eta.is_empty() || eta.len() != omega.len() {
            return Err(Error::EmptyGrid);
        }
        if eta[0] <= 0.0 || eta.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("table abscissae must be positive and increasing".into()));
        }
        Ok(Self { eta, omega, small: None })
    }

    /// Below the first node, `ω(η) = ω(η₀)·s(η)/s(η₀)`.
    pub fn with_small_scale(mut self, shape: ShapeFn) -> Self {
        self.small = Some(shape);
        self
    }

    pub fn lo(&self) -> f64 {
        self.eta[0]
    }

    pub fn hi(&self) -> f64 {
        *self.eta.last().unwrap()
    }

    fn eval(&self, eta: f64) -> Result<f64> {
        let (lo, hi) = (self.lo(), self.hi());
        if eta > hi * (1.0 + 1e-12) {
            return Err(Error::TableGap { needed_lo: eta, needed_hi: eta });
        }
        if eta < lo {
            let s = self.small.as_ref().ok_or(Error::NotExtendable(lo))?;
            let s0 = s(lo);
            return Ok(if s0 == 0.0 { 0.0 } else { self.omega[0] * s(eta) / s0 });
        }
        let i = self.eta.partition_point(|&e| e < eta);
        if i == 0 {
            return Ok(self.omega[0]);
        }
        if i == self.eta.len() {
            return Ok(*self.omega.last().unwrap());
        }
        // linear in log η
        let (a, b) = (self.eta[i - 1], self.eta[i]);
        let s = (eta / a).ln() / (b / a).ln();
        Ok(self.omega[i - 1] + s * (self.omega[i] - self.omega[i - 1]))
    }
}

/// A modulus of continuity `ω` as used by the bound functionals.
#[derive(Clone)]
pub enum Modulus {
    Zero,
    /// `coef·η^α`.
    Power {
        coef: f64,
        alpha: f64,
    },
    /// `coef·μ(η)`.
    Majorant {
        coef: f64,
        mu: Majorant,
    },
    Table(ModulusTable),
    Fn(ShapeFn),
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Zero => write!(f, "Zero"),
            Modulus::Power { coef, alpha } => write!(f, "Power({coef}·η^{alpha})"),
            Modulus::Majorant { coef, mu } => write!(f, "Majorant({coef}·{mu})"),
            Modulus::Table(t) => t.fmt(f),
            Modulus::Fn(_) => write!(f, "Fn"),
        }
    }
}

impl Modulus {
    pub fn power(alpha: f64) -> Self {
        Modulus::Power { coef: 1.0, alpha }
    }

    pub fn eval(&self, eta: f64) -> Result<f64> {
        if eta <= 0.0 {
            return Ok(0.0);
        }
        Ok(match self {
            Modulus::Zero => 0.0,
            Modulus::Power { coef, alpha } => coef * eta.powf(*alpha),
            Modulus::Majorant { coef, mu } => coef * mu.eval(eta),
            Modulus::Table(t) => t.eval(eta)?,
            Modulus::Fn(f) => f(eta),
        })
    }

    fn is_zero(&self) -> bool {
        matches!(self, Modulus::Zero)
    }
}

/// `∫_a^b ω(η) η^{−p} dη` by the trapezoid rule in `ln η`.
fn log_trapezoid(omega: &Modulus, a: f64, b: f64, p: i32) -> Result<f64> {
    if omega.is_zero() || a >= b {
        return Ok(0.0);
    }
    let nodes = log_nodes(a, b, NODES_PER_DECADE);
    let f = |eta: f64| -> Result<f64> { Ok(omega.eval(eta)? * eta.powi(1 - p)) };
    let mut sum = 0.0;
    let mut prev = f(nodes[0])?;
    for w in nodes.windows(2) {
        let cur = f(w[1])?;
        sum += 0.5 * (prev + cur) * (w[1] / w[0]).ln();
        prev = cur;
    }
    Ok(sum)
}

fn check_eps(eps: f64, d: f64) -> Result<()> {
    if !(eps > 0.0) || !(d > 0.0) {
        return Err(Error::InvalidArgument(format!("need eps > 0 and d > 0, got {eps}, {d}")));
    }
    Ok(())
}

/// `ε ∫_ε^{2d} ω(η)/η² dη`.
pub fn bound_thm2(omega: &Modulus, eps: f64, d: f64) -> Result<f64> {
    check_eps(eps, d)?;
    if let Modulus::Table(t) = omega {
        if t.hi() < 2.0 * d * (1.0 - 1e-12) || (t.lo() > eps && t.small.is_none()) {
            return Err(Error::TableGap { needed_lo: eps, needed_hi: 2.0 * d });
        }
    }
    Ok(eps * log_trapezoid(omega, eps, 2.0 * d, 2)?)
}

/// `M + ε ∫_ε^{2d} ω(η)/η² dη`.
pub fn bound_thm1(omega: &Modulus, m_value: f64, eps: f64, d: f64) -> Result<f64> {
    Ok(m_value + bound_thm2(omega, eps, d)?)
}

/// `∫_0^ε ω(η)/η dη + ε ∫_ε^{2d} ω(η)/η² dη`.
pub fn bound_zygmund(omega: &Modulus, eps: f64, d: f64) -> Result<f64> {
    let head = dini_integral(omega, eps)?;
    if head.divergent {
        return Ok(f64::INFINITY);
    }
    Ok(head.value + bound_thm2(omega, eps, d)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiniValue {
    pub value: f64,
    /// Set when the dyadic block sums stop decaying geometrically.
    pub divergent: bool,
    pub blocks: usize,
}

/// `∫_0^upper ω(η)/η dη` summed over dyadic blocks `[u·2^{−k−1}, u·2^{−k}]`
/// with Gauss–Legendre in `ln η`; the tail past the last block is
/// extrapolated geometrically, or flagged divergent when the block ratio
/// approaches one.
pub fn dini_integral(omega: &Modulus, upper: f64) -> Result<DiniValue> {
    if !(upper > 0.0) {
        return Err(Error::InvalidArgument(format!("upper limit must be positive, got {upper}")));
    }
    if omega.is_zero() {
        return Ok(DiniValue { value: 0.0, divergent: false, blocks: 0 });
    }
    let block = |k: usize| -> Result<f64> {
        let (hi, lo) = (upper * 0.5f64.powi(k as i32), upper * 0.5f64.powi(k as i32 + 1));
        let mut s = 0.0;
        for (x, w) in gauss8(lo.ln(), hi.ln()) {
            s += w * omega.eval(x.exp())?;
        }
        Ok(s)
    };
    let mut sum = 0.0;
    let mut prev = block(0)?;
    sum += prev;
    for k in 1..DINI_MAX_BLOCKS {
        let b = block(k)?;
        sum += b;
        if b <= 1e-16 * sum.abs() {
            return Ok(DiniValue { value: sum, divergent: false, blocks: k + 1 });
        }
        if k + 1 == DINI_MAX_BLOCKS {
            let r = b / prev;
            if r >= DINI_DIVERGENT_RATIO {
                return Ok(DiniValue { value: sum, divergent: true, blocks: k + 1 });
            }
            sum += b * r / (1.0 - r);
        }
        prev = b;
    }
    Ok(DiniValue { value: sum, divergent: false, blocks: DINI_MAX_BLOCKS })
}
