//! Normal majorants `μ` of class `(σ, k)`: non-decreasing, `μ(0⁺) = 0`,
//! and `μ(λη) <= σ λ^k μ(η)` for `λ > 1`.

use std::fmt;

use crate::error::{Error, Result};

/// Right end of the verification range and of the default domain.
pub const DOMAIN_MAX: f64 = 4.0;

/// Dyadic depth of the verification grid `η = DOMAIN_MAX·2^{−j}`.
const GRID_DEPTH: i32 = 40;

/// Relative round-off allowance in the grid checks.
const ROUNDOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum MajorantKind {
    /// `η^α`.
    Power { alpha: f64 },
    /// `η·ln(4e/η)` on `(0, 4]`.
    PowerLog,
    /// Piecewise-linear through `(0, 0)` and the given nodes.
    Table { eta: Vec<f64>, mu: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Majorant {
    kind: MajorantKind,
    sigma: f64,
    k: f64,
    domain_max: f64,
}

impl Majorant {
    pub fn kind(&self) -> &MajorantKind {
        &self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn domain_max(&self) -> f64 {
        self.domain_max
    }

    /// `μ(η)`; zero for `η <= 0`. Past the domain the normality bound with
    /// `λ = η / domain_max` is used as the extension.
    pub fn eval(&self, eta: f64) -> f64 {
        if eta <= 0.0 {
            return 0.0;
        }
        if eta > self.domain_max {
            let lambda = eta / self.domain_max;
            return self.sigma * lambda.powf(self.k) * self.raw(self.domain_max);
        }
        self.raw(eta)
    }

    fn raw(&self, eta: f64) -> f64 {
        match &self.kind {
            MajorantKind::Power { alpha } => eta.powf(*alpha),
            MajorantKind::PowerLog => eta * (4.0 * std::f64::consts::E / eta).ln(),
            MajorantKind::Table { eta: xs, mu } => {
                let i = xs.partition_point(|&x| x < eta);
                if i == 0 {
                    return mu[0] * eta / xs[0];
                }
                if i == xs.len() {
                    return mu[i - 1];
                }
                let s = (eta - xs[i - 1]) / (xs[i] - xs[i - 1]);
                mu[i - 1] + s * (mu[i] - mu[i - 1])
            }
        }
    }

    /// `ε ∫_ε^{upper} μ(η)/η² dη` in closed form where one exists.
    pub fn tail_integral_closed_form(&self, eps: f64, upper: f64) -> Option<f64> {
        if upper > self.domain_max || !(eps > 0.0) || eps >= upper {
            return None;
        }
        match &self.kind {
            MajorantKind::Power { alpha } if (*alpha - 1.0).abs() < 1e-15 => Some(eps * (upper / eps).ln()),
            MajorantKind::Power { alpha } => {
                let p = alpha - 1.0;
                Some(eps * (upper.powf(p) - eps.powf(p)) / p)
            }
            MajorantKind::PowerLog => {
                // ∫ ln(4e/η)/η dη = (1 + ln 4) ln η − (ln η)²/2
                let f = |x: f64| (1.0 + 4f64.ln()) * x.ln() - 0.5 * x.ln() * x.ln();
                Some(eps * (f(upper) - f(eps)))
            }
            MajorantKind::Table { .. } => None,
        }
    }
}

impl fmt::Display for Majorant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MajorantKind::Power { alpha } => write!(f, "power:{alpha}"),
            MajorantKind::PowerLog => write!(f, "powerlog"),
            MajorantKind::Table { eta, .. } => write!(f, "table[{}]", eta.len()),
        }
    }
}

/// Builds a majorant and verifies the claimed class `(sigma, k)` together
/// with monotonicity on the grid `η = 4·2^{−j}`, `λ = 2^m`, `λη <= 4`.
pub fn make_majorant(kind: MajorantKind, sigma: f64, k: f64) -> Result<Majorant> {
    let invalid = |m: &str| Error::InvalidArgument(m.to_string());
    if !(sigma >= 1.0) || !(k >= 0.0) {
        return Err(invalid("class needs sigma >= 1 and k >= 0"));
    }
    let domain_max = match &kind {
        MajorantKind::Power { alpha } => {
            if !(*alpha > 0.0 && alpha.is_finite()) {
                return Err(invalid("power exponent must be positive"));
            }
            DOMAIN_MAX
        }
        MajorantKind::PowerLog => DOMAIN_MAX,
        MajorantKind::Table { eta, mu } => {
            if eta.is_empty() || eta.len() != mu.len() {
                return Err(invalid("table needs matching non-empty columns"));
            }
            if eta[0] <= 0.0 || eta.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("table abscissae must be positive and increasing"));
            }
            if mu.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) {
                return Err(invalid("table values must be finite and non-negative"));
            }
            *eta.last().unwrap()
        }
    };
    let m = Majorant { kind, sigma, k, domain_max };
    verify(&m)?;
    Ok(m)
}

fn verify(m: &Majorant) -> Result<()> {
    let grid: Vec<f64> = (0..=GRID_DEPTH).map(|j| m.domain_max * 0.5f64.powi(j)).collect();
    // monotone, checked on a grid four times finer than the dyadic one
    let mut prev = 0.0;
    for j in (0..=4 * GRID_DEPTH).rev() {
        let eta = m.domain_max * 2f64.powf(-j as f64 / 4.0);
        let v = m.raw(eta);
        if v < prev * (1.0 - ROUNDOFF) {
            return Err(Error::NotMonotone(eta));
        }
        prev = v;
    }
    for (j, &eta) in grid.iter().enumerate() {
        let base = m.raw(eta);
        for s in 1..=j {
            let lambda = 2f64.powi(s as i32);
            let lhs = m.raw(grid[j - s]);
            let rhs = m.sigma * lambda.powf(m.k) * base;
            if lhs > rhs * (1.0 + ROUNDOFF) {
                return Err(Error::NormalityViolation { sigma: m.sigma, k: m.k, eta, lambda });
            }
        }
    }
    Ok(())
}

/// `μ(η₂)/η₂ <= σ μ(η₁)/η₁` for `η₁ < η₂`, valid for class `(σ, 1)`.
pub fn majorant_ratio_check(mu: &Majorant, eta1: f64, eta2: f64) -> Result<bool> {
    if mu.k != 1.0 {
        return Err(Error::ClassMismatch(mu.k));
    }
    if !(eta1 > 0.0 && eta2 > eta1) {
        return Err(Error::InvalidArgument(format!("need 0 < eta1 < eta2, got {eta1}, {eta2}")));
    }
    let lhs = mu.eval(eta2) / eta2;
    let rhs = mu.sigma * mu.eval(eta1) / eta1;
    Ok(lhs <= rhs * (1.0 + ROUNDOFF))
}

/// Parses `power:<alpha>` or `powerlog`. Powers with `α <= 1` get class
/// `(1, 1)`, larger ones `(1, α)`.
pub fn parse_majorant(spec: &str) -> Result<Majorant> {
    let bad = |reason: &str| Error::DensitySpec { spec: spec.to_string(), reason: reason.to_string() };
    let s = crate::parse::normalize(spec);
    if s == "powerlog" {
        return make_majorant(MajorantKind::PowerLog, 1.0, 1.0);
    }
    let alpha = s
        .strip_prefix("power:")
        .and_then(crate::parse::real)
        .ok_or_else(|| bad("expected `power:<alpha>` or `powerlog`"))?;
    make_majorant(MajorantKind::Power { alpha }, 1.0, alpha.max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn shipped_classes() {
        assert!(make_majorant(MajorantKind::Power { alpha: 0.5 }, 1.0, 1.0).is_ok());
        assert!(make_majorant(MajorantKind::Power { alpha: 1.0 }, 1.0, 1.0).is_ok());
        assert!(make_majorant(MajorantKind::PowerLog, 1.0, 1.0).is_ok());
        let r = make_majorant(MajorantKind::Power { alpha: 2.0 }, 1.0, 1.0);
        assert!(matches!(r, Err(Error::NormalityViolation { .. })));
        assert!(make_majorant(MajorantKind::Power { alpha: 2.0 }, 1.0, 2.0).is_ok());
    }

    #[test]
    fn rejects_non_monotone_table() {
        let r = make_majorant(MajorantKind::Table { eta: vec![0.5, 1.0, 2.0], mu: vec![0.5, 0.3, 1.0] }, 4.0, 1.0);
        assert!(matches!(r, Err(Error::NotMonotone(_))));
    }

    #[test]
    fn ratio_check_examples() {
        let id = parse_majorant("power:1").unwrap();
        assert!(majorant_ratio_check(&id, 0.1, 0.3).unwrap());
        let sqrt = parse_majorant("power:0.5").unwrap();
        assert!(majorant_ratio_check(&sqrt, 0.01, 0.04).unwrap());
        let sq = parse_majorant("power:2").unwrap();
        assert_eq!(majorant_ratio_check(&sq, 0.1, 0.2), Err(Error::ClassMismatch(2.0)));
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for m in [
            parse_majorant("power:1").unwrap(),
            parse_majorant("power:0.5").unwrap(),
            parse_majorant("powerlog").unwrap(),
        ] {
            for eps in [0.25, 1.0 / 64.0] {
                let cf = m.tail_integral_closed_form(eps, 4.0).unwrap();
                let q = crate::quadrature::adaptive_simpson(&|x: f64| m.eval(x) / (x * x), eps, 4.0, 1e-12).unwrap();
                assert_abs_diff_eq!(cf, eps * q, epsilon = 1e-9);
            }
        }
        // ε ∫ dη/η = ε ln(4/ε)
        let id = parse_majorant("power:1").unwrap();
        assert_abs_diff_eq!(id.tail_integral_closed_form(0.25, 4.0).unwrap(), 0.25 * 16f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(parse_majorant("power:x"), Err(Error::DensitySpec { .. })));
        assert!(parse_majorant("power:-1").is_err());
    }

    proptest! {
        #[test]
        fn power_normality(alpha in 0.05f64..1.0, eta in 1e-6f64..1.0, lambda in 1.0f64..4.0) {
            let m = make_majorant(MajorantKind::Power { alpha }, 1.0, 1.0).unwrap();
            prop_assume!(lambda * eta <= 4.0);
            prop_assert!(m.eval(lambda * eta) <= lambda * m.eval(eta) * (1.0 + 1e-12));
        }

        #[test]
        fn powerlog_ratio_check(a in 1e-6f64..1.0, b in 1e-6f64..1.0) {
            prop_assume!(a < b);
            let m = parse_majorant("powerlog").unwrap();
            prop_assert!(majorant_ratio_check(&m, a, b).unwrap());
        }
    }
}
