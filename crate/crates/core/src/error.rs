//! Error type shared by every module of the crate.

use crate::gaussian::BasisOrdering;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimension {dim} is odd; covariance matrices are 2n x 2n")]
    OddDimension { dim: usize },

    #[error("matrix is not symmetric (max |a_ij - a_ji| = {max_asymmetry:.3e}, allowed {tolerance:.3e})")]
    NotSymmetric { max_asymmetry: f64, tolerance: f64 },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:.6e})")]
    NotPositiveSemiDefinite { min_eigenvalue: f64 },

    #[error("coefficient matrix is not positive definite (min eigenvalue {min_eigenvalue:.6e}); energy is not bounded below")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("potential has a zero mode (min eigenvalue {min_eigenvalue:.6e} <= {threshold:.1e}); the thermal state does not exist")]
    ZeroMode { min_eigenvalue: f64, threshold: f64 },

    #[error("matrix function is not finite on the spectrum (f({eigenvalue:.6e}) = {value})")]
    SingularSpectrum { eigenvalue: f64, value: f64 },

    #[error("{context}: expected dimension {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("basis ordering mismatch: {left:?} vs {right:?}")]
    OrderingMismatch {
        left: BasisOrdering,
        right: BasisOrdering,
    },

    #[error("frequency {value} is not a finite nonnegative real")]
    InvalidFrequency { value: f64 },

    #[error("frequency spectrum is empty")]
    EmptySpectrum,

    #[error("{name} = {value} is outside the domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid system description: {0}")]
    InvalidSystem(String),

    #[error("failed to parse system description: {0}")]
    Parse(String),
}
