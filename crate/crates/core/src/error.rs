use thiserror::Error;

/// Errors raised by the library.
///
/// Parse errors carry the 1-based line number of the offending record.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{field}: {message}")]
    Invariant { field: String, message: String },

    #[error("{field}: value {value} out of range ({message})")]
    Range {
        field: String,
        value: f64,
        message: String,
    },

    #[error("index {index} out of range (length {len})")]
    Index { index: usize, len: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("2^lambda overflows the exact integer range at lambda = {lambda} (admissible lambda < {max_lambda})")]
    Overflow { lambda: f64, max_lambda: f64 },

    #[error("oracle limited to N <= {max}, got N = {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error("inadmissible instance: {0}")]
    Inadmissible(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn invariant(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invariant {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn range(field: impl Into<String>, value: f64, message: impl Into<String>) -> Self {
        Error::Range {
            field: field.into(),
            value,
            message: message.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
