//! Crate-wide error type.

/// Errors reported by the library.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Model or solver parameters violate a documented invariant.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested object (orbit, threshold) does not exist for these
    /// parameters.
    #[error("existence error: {0}")]
    Existence(String),

    /// The impulsive integrator failed; carries the last good state.
    #[error("integration failed at t = {t}: {reason}")]
    Integration {
        reason: String,
        t: f64,
        last_state: Vec<f64>,
    },

    /// An iterative solver stopped before reaching its target residual.
    #[error("no convergence after {iterations} iterations (best residual {residual:.3e}): {context}")]
    Convergence {
        context: String,
        residual: f64,
        iterations: usize,
    },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed: {0}")]
    Quadrature(String),

    /// I/O or format errors at the CLI boundary.
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
