use thiserror::Error;

/// Errors produced by this crate.
///
/// Variants are grouped by what the caller can do about them:
/// invalid numeric input, an angle outside a convention's declared range,
/// a malformed file or string, an operation the crate knows it cannot
/// perform, geometry too degenerate to solve, or plain I/O failure.
#[derive(Debug, Error)]
pub enum Error {
    /// Numeric input violated a documented precondition (non-finite value,
    /// non-orthonormal matrix, wrong point count, and so on).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An Euler angle fell outside the range its convention declares.
    #[error("angle out of range: {0}")]
    AngleRange(String),

    /// A file or string could not be parsed into the expected shape.
    #[error("format error: {0}")]
    Format(String),

    /// The request names a convention, conversion pair, or style this
    /// crate does not implement.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Point geometry admits no unique solution (collinear, coincident,
    /// or too few points after filtering).
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// Underlying I/O failure while reading or writing a file.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn range(msg: impl Into<String>) -> Self {
        Error::AngleRange(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateGeometry(msg.into())
    }
}
