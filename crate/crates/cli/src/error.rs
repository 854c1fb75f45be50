use thiserror::Error;

/// Failure categories, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("infeasible size: {0}")]
    Infeasible(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("computation failed: {0}")]
    Compute(blindspin_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::NonConvergence(_) => 4,
            CliError::Compute(_) => 5,
            CliError::Io(_) | CliError::Output(_) => 6,
        }
    }
}

impl From<blindspin_core::Error> for CliError {
    fn from(e: blindspin_core::Error) -> Self {
        use blindspin_core::Error as E;
        match e {
            E::DimensionCeiling { .. } => CliError::Infeasible(e.to_string()),
            E::NonConvergence(_) | E::StepUnderflow { .. } => CliError::NonConvergence(e.to_string()),
            E::InvalidModel(_) | E::InvalidAxis { .. } | E::SiteOutOfRange { .. } | E::InvalidArgument(_) => {
                CliError::Config(e.to_string())
            }
            E::Io(io) => CliError::Io(io),
            other => CliError::Compute(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
