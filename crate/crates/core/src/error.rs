use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method did not converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A user-supplied function returned NaN or infinity.
    #[error("non-finite value {value} at t = {at} ({context})")]
    NonFinite { value: f64, at: f64, context: String },

    /// A linear system was singular to working tolerance.
    #[error("singular system: pivot {pivot:e} at row {row}, condition estimate {cond:e}")]
    Singular { row: usize, pivot: f64, cond: f64 },

    /// Two objects that must agree (measures, families, sizes) do not.
    #[error("mismatch: {0}")]
    Mismatch(String),

    /// Invalid configuration supplied by the caller.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
