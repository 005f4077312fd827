//! Error type shared by every module.
//!
//! Failure here is almost always a contract violation the caller can repair
//! (wrong precision, wrong dimensions, oversized enumeration), so each
//! variant carries a human-readable account of what was violated. Nothing is
//! ever silently truncated or padded.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Inputs outside an operation's mathematical domain.
    Domain(String),
    /// A coefficient or digit beyond the exactly-known window was needed.
    Precision(String),
    /// Matrix/vector shapes do not cover the requested index range.
    Dimension(String),
    /// The point set is not weakly admissible (collision or undecidable).
    Admissibility(String),
    /// An exhaustive enumeration would exceed the configured cap.
    EnumerationTooLarge { size: u128, cap: u128 },
    /// Block classes not all matched within the search bound.
    EndConditionFailed { unmatched: Vec<String> },
    /// A constrained linear system has no usable solution.
    Infeasible(String),
    /// No position subset satisfies the required pairwise gap.
    Spacing(String),
    /// An exhaustive search ended without a witness.
    SearchFailed(String),
    /// A verdict could not be decided either way at this scale.
    Inconclusive(String),
    /// Malformed configuration or serialized input.
    Validation(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Precision(msg) => write!(f, "precision error: {msg}"),
            Error::Dimension(msg) => write!(f, "dimension error: {msg}"),
            Error::Admissibility(msg) => write!(f, "admissibility error: {msg}"),
            Error::EnumerationTooLarge { size, cap } => {
                write!(f, "enumeration of {size} items exceeds cap {cap}")
            }
            Error::EndConditionFailed { unmatched } => write!(
                f,
                "block classes unmatched within search bound: [{}]",
                unmatched.join(", ")
            ),
            Error::Infeasible(msg) => write!(f, "infeasible system: {msg}"),
            Error::Spacing(msg) => write!(f, "spacing error: {msg}"),
            Error::SearchFailed(msg) => write!(f, "search failed: {msg}"),
            Error::Inconclusive(msg) => write!(f, "inconclusive: {msg}"),
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }
    pub fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
    pub fn admissibility(msg: impl Into<String>) -> Self {
        Error::Admissibility(msg.into())
    }
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
