//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in this crate.
///
/// All variants are recoverable caller errors or reported numerical-budget
/// failures; none indicate a poisoned internal state.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Walk dimensions were rejected (M = 0, N = 0, or N not divisible by M).
    InvalidDims {
        n: usize,
        m: usize,
        reason: &'static str,
    },
    /// A scalar argument fell outside its domain.
    Domain { what: &'static str, value: f64 },
    /// The closed-form interpolated spectrum produced a negative eigenvalue.
    NegativeEigenvalue { k: usize, value: f64 },
    /// A matrix dimension exceeded the configured cap.
    DimCapExceeded { n: usize, cap: usize },
    /// A matrix handed to the eigensolver was not symmetric.
    NotSymmetric { max_asymmetry: f64 },
    /// Adaptive quadrature exhausted its subdivision budget.
    QuadratureBudget { estimate: f64, error_bound: f64 },
    /// The water-level bisection could not bracket or meet the target rate.
    BracketFailure { rate: f64 },
    /// An input slice had the wrong length.
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// Second moments violated a consistency requirement (negativity or
    /// Cauchy-Schwarz) at the given index.
    InvalidMoments { reason: &'static str, index: usize },
    /// A derived quantity violated an internal sanity bound.
    Inconsistent { what: &'static str, value: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDims { n, m, reason } => {
                write!(f, "invalid walk dimensions N={n}, M={m}: {reason}")
            }
            Error::Domain { what, value } => {
                write!(f, "{what} = {value} is outside the valid domain")
            }
            Error::NegativeEigenvalue { k, value } => {
                write!(f, "closed-form eigenvalue {k} is negative ({value})")
            }
            Error::DimCapExceeded { n, cap } => {
                write!(f, "dimension {n} exceeds the configured cap {cap}")
            }
            Error::NotSymmetric { max_asymmetry } => {
                write!(
                    f,
                    "matrix is not symmetric (max asymmetry {max_asymmetry:e})"
                )
            }
            Error::QuadratureBudget {
                estimate,
                error_bound,
            } => write!(
                f,
                "quadrature subdivision budget exhausted (estimate {estimate}, \
                 error bound {error_bound:e})"
            ),
            Error::BracketFailure { rate } => {
                write!(f, "failed to bracket or meet target rate {rate}")
            }
            Error::LengthMismatch {
                what,
                expected,
                got,
            } => {
                write!(f, "{what}: expected length {expected}, got {got}")
            }
            Error::InvalidMoments { reason, index } => {
                write!(f, "invalid second moments at index {index}: {reason}")
            }
            Error::Inconsistent { what, value } => {
                write!(f, "internal consistency check failed: {what} = {value}")
            }
        }
    }
}

impl std::error::Error for Error {}
