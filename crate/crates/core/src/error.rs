use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Inconsistent or out-of-range construction parameters.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A hard physical guard was violated (only raised in strict mode).
    #[error("validation failed: {message}")]
    Validation {
        message: String,
        location: Option<(f64, f64)>,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("non-finite value after step {step}")]
    NonFinite { step: usize },

    #[error("linear solve did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("trajectory step exploded at t = {t}: |dx| = {step_length} exceeds {limit}")]
    StepExplosion { t: f64, step_length: f64, limit: f64 },

    #[error("time step too coarse: jump probability per step {probability} exceeds 0.1")]
    TimeStepTooCoarse { probability: f64 },

    #[error("asymptotic form invalid: {0}")]
    AsymptoticInvalid(String),

    #[error("wrong branch: {0}")]
    WrongBranch(String),

    #[error("no cavity mode: {0}")]
    NoMode(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for errors caused by user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Validation { .. } | Error::GridMismatch(_) | Error::WrongBranch(_)
        )
    }
}
