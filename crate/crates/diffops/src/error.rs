//! Crate-wide error type.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Exact division was requested but the divisor does not divide.
    NotDivisible,
    /// Division by zero (scalar, polynomial or localization denominator).
    DivisionByZero,
    /// Operands live over different variable counts or different primes.
    ArityMismatch(String),
    /// An exponent exceeded the desk-scale construction guard.
    ExponentOverflow,
    /// A matrix expected to be invertible is singular.
    SingularMatrix,
    /// Group closure exceeded the configured maximum order.
    GroupTooLarge(usize),
    /// The group does not preserve the weighted grading.
    GradingNotPreserved,
    /// A dimension sequence is too short for the requested window.
    TooShortSequence { len: usize, need: usize },
    /// An operator fell outside the filtration level it was claimed in.
    NotInLevel(String),
    /// Ring presentation not supported by the requested operation.
    UnsupportedPresentation(String),
    /// Invalid parameter (slopes, weights, exponents of reindexing, ...).
    BadParameter(String),
    /// Text input could not be parsed.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotDivisible => write!(f, "exact division failed: not divisible"),
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::ArityMismatch(m) => write!(f, "arity mismatch: {m}"),
            Error::ExponentOverflow => write!(f, "exponent exceeds 2^31 construction guard"),
            Error::SingularMatrix => write!(f, "matrix is singular"),
            Error::GroupTooLarge(max) => write!(f, "group closure exceeded maximum order {max}"),
            Error::GradingNotPreserved => {
                write!(f, "group does not preserve the weighted grading")
            }
            Error::TooShortSequence { len, need } => {
                write!(f, "dimension sequence of length {len} too short, need {need}")
            }
            Error::NotInLevel(m) => write!(f, "operator not in claimed level: {m}"),
            Error::UnsupportedPresentation(m) => write!(f, "unsupported presentation: {m}"),
            Error::BadParameter(m) => write!(f, "bad parameter: {m}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
