//! Error taxonomy shared across the crate.
//!
//! Variants are grouped by failure class rather than by module so callers
//! (and the CLI exit-code mapping) can react uniformly: configuration and
//! argument problems are recoverable user errors, while numeric failures
//! indicate the computation itself broke down.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A function argument violated its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix failed a structural precondition (symmetry, definiteness,
    /// dimension agreement).
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// An iterative method ran out of iterations before reaching its
    /// tolerance. `residual` is the last measured convergence metric.
    #[error("convergence failure: {context} (last residual {residual:.3e} after {iterations} iterations)")]
    ConvergenceFailure {
        context: String,
        residual: f64,
        iterations: usize,
    },

    /// The computation produced non-finite values or an otherwise unusable
    /// numerical result.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// A measurement window is empty or contaminated (e.g. boundary
    /// reflections arrive before the direct wave has fully passed a probe).
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    /// A signal is unusable for the requested measurement (e.g. zero
    /// amplitude where a ratio is needed).
    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    /// A signal exists but does not contain enough structure (e.g. too few
    /// oscillation cycles to estimate a frequency).
    #[error("insufficient signal: {0}")]
    InsufficientSignal(String),

    /// Scenario configuration could not be parsed or failed validation.
    /// The message names the offending field or rule.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Convenience constructor for [`Error::InvalidArgument`].
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Convenience constructor for [`Error::InvalidMatrix`].
    pub fn invalid_matrix(msg: impl Into<String>) -> Self {
        Error::InvalidMatrix(msg.into())
    }
}
