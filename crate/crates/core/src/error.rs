use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("site {site} out of range for a ring of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid reflection axis {axis} for {n_sites} sites")]
    InvalidAxis { axis: usize, n_sites: usize },
    #[error("dimension {dim} exceeds the dense ceiling {ceiling}")]
    DimensionCeiling { dim: usize, ceiling: usize },
    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("operator dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("iterative eigensolver did not converge: {0}")]
    NonConvergence(String),
    #[error("operation requires a complete spectrum")]
    PartialSpectrum,
    #[error("operator does not commute with the Hamiltonian on cluster {cluster} (leakage {leakage:.3e})")]
    NotCommuting { cluster: usize, leakage: f64 },
    #[error("adaptive integrator step size underflow at t = {t:.6e}")]
    StepUnderflow { t: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
