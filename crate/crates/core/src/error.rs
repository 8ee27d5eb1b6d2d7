use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported shape: expected d={expected_d}, m={expected_m}, got d={d}, m={m}")]
    UnsupportedShape {
        expected_d: usize,
        expected_m: usize,
        d: usize,
        m: usize,
    },

    #[error("invalid function grid: {0}")]
    InvalidGrid(String),

    #[error("level {0} out of range (1..=30)")]
    LevelOutOfRange(u32),

    #[error("cube enumeration cap exceeded: q*n^2 = {requested} > {cap}")]
    EnumerationCap { requested: u64, cap: u64 },

    #[error("count overflow while summing 2^(q*n^2) terms")]
    CountOverflow,

    #[error("chart evaluation left {region} at x = {x:?}")]
    RangeEscape { region: &'static str, x: Vec<f64> },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field: field.to_string(),
        reason: reason.into(),
    }
}
