use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument or parameter lies outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative routine failed to reach its tolerance within budget.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// A root-finding target is not straddled by the bracket.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// A parameter set cannot be expressed in the requested parameterisation.
    #[error("representation error: {0}")]
    Representation(String),

    /// The kurtosis measure is not injective where it is required to be.
    #[error("injectivity failure: {0}")]
    Injectivity(String),

    /// A Monte Carlo proposal or covariance is degenerate.
    #[error("degenerate proposal: {0}")]
    Degenerate(String),

    /// Malformed input data or configuration.
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
