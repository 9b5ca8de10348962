//! Error type shared by every fallible operation in the crate.

use core::fmt;

/// Crate-wide error type.
///
/// Variants carry a static message naming the violated precondition or the
/// failing routine; they deliberately avoid allocation so the type stays
/// cheap in `no_std` contexts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// An argument violates a documented precondition (bad parameter value,
    /// empty input, out-of-range index).
    Domain(&'static str),
    /// The operation was invoked on a model variant it does not support
    /// (for example a series density on an anti-correlated model).
    Contract(&'static str),
    /// A numeric routine failed: non-finite intermediate, no convergence,
    /// or an exhausted retry budget.
    Numeric(&'static str),
}

impl Error {
    /// The human-readable message carried by the variant.
    pub fn message(&self) -> &'static str {
        match self {
            Error::Domain(m) | Error::Contract(m) | Error::Numeric(m) => m,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Contract(m) => write!(f, "contract error: {m}"),
            Error::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

impl core::error::Error for Error {}

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
