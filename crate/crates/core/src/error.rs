//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition (stability bound, coincident points, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// Two vectors or matrices were built over different generator bases.
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// A linear system has no exact solution; carries a description of the residual.
    #[error("inconsistent linear system: {0}")]
    Contradiction(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    /// Contour clearance could not be respected for the given point configuration.
    #[error("clearance violated: {0}")]
    Clearance(String),

    #[error("quadrature did not converge: achieved error {achieved:.3e} above target {target:.3e}")]
    Quadrature { achieved: f64, target: f64 },

    #[error("ill-conditioned system: condition number {0:.3e}")]
    IllConditioned(f64),

    /// Evaluation requested at a point where the quantity is not defined.
    #[error("evaluation at singular point: {0}")]
    SingularPoint(String),

    #[error("extrapolation failed: {0}")]
    Extrapolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
