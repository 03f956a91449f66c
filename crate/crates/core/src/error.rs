//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed record: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("line {line}: timestamp {curr} decreases below {prev}")]
    NonMonotoneTimestamp { line: usize, prev: i64, curr: i64 },

    #[error("line {line}: bid {bid} exceeds ask {ask}")]
    InvertedSpread { line: usize, ask: f64, bid: f64 },

    #[error("non-positive price at index {index}")]
    NonPositivePrice { index: usize },

    #[error("no tick precedes the first grid point")]
    EmptyWindow,

    #[error("series too short: need {needed} ticks, have {len}")]
    SeriesTooShort { needed: usize, len: usize },

    #[error("index {index} out of range for series of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("shape mismatch: {left}x{left} vs {right}x{right}")]
    ShapeMismatch { left: usize, right: usize },

    #[error("no window satisfies the condition")]
    NoQualifyingWindows,

    #[error("every window has a zero polarization denominator")]
    AllDenominatorsZero,

    #[error("empty distance set")]
    EmptyDistances,

    #[error("need at least 3 fit points with C > 0 inside the fit range, found {found}")]
    InsufficientFitPoints { found: usize },

    #[error("empty angular-momentum history")]
    EmptyHistory,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of a numeric/statistical nature (as opposed to bad
    /// input data or configuration). The CLI maps these to a distinct exit code.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::AllDenominatorsZero
                | Error::InsufficientFitPoints { .. }
                | Error::EmptyDistances
                | Error::EmptyHistory
                | Error::NoQualifyingWindows
        )
    }
}
