//! Error types shared across the library.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A size limit was exceeded (qubit cap, dense-diagonalization cap, ...).
    #[error("capacity: {0}")]
    Capacity(String),

    /// Mismatched dimensions between states, circuits, and parameter vectors.
    #[error("shape: {0}")]
    Shape(String),

    /// An argument violated a precondition.
    #[error("argument: {0}")]
    Argument(String),

    /// A non-finite value or singular linear system was encountered.
    #[error("numeric: {0}")]
    Numeric(String),

    /// The adaptive integrator failed; carries the trajectory up to the failure.
    #[error("integration failed at tau={tau}: {reason}")]
    Integration {
        tau: f64,
        reason: String,
        partial: Box<crate::varqite::Trajectory>,
    },

    /// Data collapse was requested on curves with no shared abscissae.
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// Readout mitigation denominator 1 - eps - eta is not positive.
    #[error("singular mitigation: eps={eps} + eta={eta} >= 1")]
    SingularMitigation { eps: f64, eta: f64 },

    /// Regression training data cannot determine a fit.
    #[error("fit: {0}")]
    Fit(String),

    /// All optimizer restarts diverged.
    #[error("optimization: {0}")]
    Optimization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
