use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invariant failed: {0}")]
    Invariant(String),
    #[error("non-convergence: {0}")]
    NonConvergence(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Invariant(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl From<layerpot::Error> for CliError {
    fn from(e: layerpot::Error) -> Self {
        use layerpot::Error as E;
        match e {
            E::NonConvergence { .. } | E::Quadrature { .. } | E::RefinementCap(_) => {
                CliError::NonConvergence(e.to_string())
            }
            E::OnCurve { .. } | E::SideMismatch { .. } | E::NotExtendable(_) | E::DenominatorUnderflow(_) => {
                CliError::Invariant(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}
