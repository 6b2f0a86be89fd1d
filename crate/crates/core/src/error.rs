use thiserror::Error;

/// Errors produced by the modeling, synthesis and band-analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested dual-resonance target cannot be met by a lossless
    /// parallel LC resonator.
    #[error("infeasible target at {freq_hz:.6e} Hz: {reason}")]
    InfeasibleTarget { freq_hz: f64, reason: String },

    /// An iterative solver ran out of iterations.
    #[error("no convergence after {iterations} iterations: {reason}")]
    Convergence { iterations: usize, reason: String },

    /// A band-plan file could not be parsed or failed validation.
    #[error("band plan: {0}")]
    BandPlan(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
