use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("alphabet mismatch: {left} vs {right}")]
    Alphabet { left: u32, right: u32 },

    #[error("symbol {symbol} is outside an alphabet of size {sigma}")]
    Symbol { symbol: u32, sigma: u32 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("entry ({row}, {col}) is not an exact binary Hamming distance: {reason}")]
    Inconsistent {
        row: usize,
        col: usize,
        reason: &'static str,
    },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("tree does not span its nodes: {0}")]
    Disconnected(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
