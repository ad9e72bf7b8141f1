//! Error type shared by all modules.

use crate::Algorithm;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector that must have unit l2 norm does not.
    NonUnitNorm { what: &'static str, norm: f64 },
    /// A value that must be finite is NaN or infinite.
    NonFinite { what: &'static str },
    /// A parameter is outside its admissible range.
    InvalidParam {
        name: &'static str,
        reason: &'static str,
    },
    /// A dimension is below the minimum the operation supports.
    DimensionTooSmall {
        what: &'static str,
        min: usize,
        got: usize,
    },
    /// Two lengths that must agree do not.
    DimensionMismatch { expected: usize, got: usize },
    /// An index is outside `0..bound`.
    IndexOutOfRange { index: usize, bound: usize },
    /// A support or value set that must be nonempty is empty.
    EmptySupport,
    /// A vector that must have nonzero norm is (numerically) zero.
    ZeroNorm { what: &'static str },
    /// Sum-family formulas require an equisigned `v`.
    NotEquisigned,
    /// Root bracketing for the l1 boundary walked past its expansion limit.
    BracketExpansion { limit: f64 },
    /// The requested pair has no defined geometric comparison.
    UndefinedComparison { a: Algorithm, b: Algorithm },
    /// Algorithm tag not recognized.
    UnknownAlgorithm,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonUnitNorm { what, norm } => {
                write!(f, "{what} must have unit l2 norm, got {norm}")
            }
            Error::NonFinite { what } => write!(f, "{what} contains a non-finite value"),
            Error::InvalidParam { name, reason } => write!(f, "parameter {name}: {reason}"),
            Error::DimensionTooSmall { what, min, got } => {
                write!(f, "{what} must be at least {min}, got {got}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} out of range (bound {bound})")
            }
            Error::EmptySupport => write!(f, "support must be nonempty"),
            Error::ZeroNorm { what } => write!(f, "{what} has zero norm"),
            Error::NotEquisigned => {
                write!(
                    f,
                    "sum-family formulas require an equisigned v (single sign)"
                )
            }
            Error::BracketExpansion { limit } => {
                write!(f, "root bracket expansion exceeded t = {limit}")
            }
            Error::UndefinedComparison { a, b } => {
                write!(f, "no geometric comparison is defined for {a} vs {b}")
            }
            Error::UnknownAlgorithm => write!(
                f,
                "unknown algorithm (expected sum, ell1, ell2, hc-sum, hc-ell2 or fdr)"
            ),
        }
    }
}

impl core::error::Error for Error {}
