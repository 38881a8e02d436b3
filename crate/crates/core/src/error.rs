use thiserror::Error;

/// Errors raised by table construction, code enumeration, bound evaluation
/// and the experiment runners.
#[derive(Debug, Error)]
pub enum Error {
    #[error("variable count n={n} outside 1..={max}")]
    VariableCount { n: u32, max: u32 },

    #[error("invalid hex digit {0:?} in truth table")]
    HexDigit(char),

    #[error("expected {expected} hex digits for n={n}, got {got}")]
    HexLength { n: u32, expected: usize, got: usize },

    #[error("truth table for n={n} has bits set at index >= 2^{n}")]
    TrailingBits { n: u32 },

    #[error("dimension mismatch: {left} vs {right} variables")]
    DimensionMismatch { left: u32, right: u32 },

    #[error("full spectrum needs n <= {max}, got n={n}")]
    SpectrumCap { n: u32, max: u32 },

    #[error("order r={r} violates {min} <= r <= n (n={n})")]
    Order { r: u32, n: u32, min: u32 },

    #[error("message {message:#x} does not fit in k={k} bits")]
    MessageRange { message: u64, k: u32 },

    #[error("code dimension k={k} exceeds enumeration cap {max}")]
    EnumerationCap { k: u32, max: u32 },

    #[error("parameter {name}={value} out of range: {reason}")]
    Parameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("internal cross-check failed: {0}")]
    Consistency(String),

    #[error("malformed table file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: impl ToString, reason: &'static str) -> Self {
        Error::Parameter {
            name,
            value: value.to_string(),
            reason,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
