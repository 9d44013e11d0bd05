use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid curve spec `{spec}`: {reason}")]
    CurveSpec { spec: String, reason: String },

    #[error("invalid density spec `{spec}`: {reason}")]
    DensitySpec { spec: String, reason: String },

    #[error("polygon is self-intersecting: edges {0} and {1} meet")]
    SelfIntersecting(usize, usize),

    #[error("too few samples: {got} (need at least {min})")]
    TooFewSamples { got: usize, min: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {re}{im:+}i lies on the curve")]
    OnCurve { re: f64, im: f64 },

    #[error("point {re}{im:+}i is not in the closure of the {side} domain")]
    SideMismatch { re: f64, im: f64, side: &'static str },

    #[error("truncated integral did not converge (last two values {previous} and {last})")]
    NonConvergence { previous: f64, last: f64 },

    #[error("adaptive quadrature did not reach tolerance {tol:e}")]
    Quadrature { tol: f64 },

    #[error("panel refinement exceeded depth {0}")]
    RefinementCap(usize),

    #[error("majorant is not of class ({sigma}, {k}): fails at eta={eta}, lambda={lambda}")]
    NormalityViolation { sigma: f64, k: f64, eta: f64, lambda: f64 },

    #[error("majorant is not non-decreasing near eta={0}")]
    NotMonotone(f64),

    #[error("operation needs a majorant of class (sigma, 1), got k={0}")]
    ClassMismatch(f64),

    #[error("empty grid")]
    EmptyGrid,

    #[error("modulus table does not cover [{needed_lo}, {needed_hi}]")]
    TableGap { needed_lo: f64, needed_hi: f64 },

    #[error("modulus table cannot be extended below eta={0} without a small-scale model")]
    NotExtendable(f64),

    #[error("no grid pairs within eps={0}")]
    EmptyPairSet(f64),

    #[error("denominator underflow at eps={0}")]
    DenominatorUnderflow(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
