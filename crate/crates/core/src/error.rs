use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Fock dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (max elementwise deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("linear solve failed: singular matrix (pivot {pivot})")]
    SingularMatrix { pivot: usize },

    #[error("degenerate steady state: {0}")]
    DegenerateSteadyState(String),

    #[error("undefined correlation: mean photon number {nbar:.3e} is numerically zero")]
    UndefinedCorrelation { nbar: f64 },

    #[error("negative propagation time {tau}")]
    NegativeDelay { tau: f64 },

    #[error(
        "jump probability per step {dp:.3e} reached the cap {cap:.3e} at t = {t:.6} ns; \
         reduce step_dt"
    )]
    StepSizeViolation { dp: f64, cap: f64, t: f64 },

    #[error("truncation scan did not converge within the supplied dimensions\n{table}")]
    TruncationNotConverged { table: String },

    #[error("undefined estimator: {0}")]
    UndefinedEstimator(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("validation failed: {0}")]
    ValidationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// CLI exit code for this error class: 2 config, 4 validation, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter { .. } => 2,
            Error::ValidationFailed(_) => 4,
            _ => 3,
        }
    }
}
