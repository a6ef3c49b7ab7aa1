use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("symbol {symbol} is outside the alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u8, alphabet: u8 },
    #[error("state is halted")]
    Halted,
    #[error("cannot parse state id {text:?}: {reason}")]
    ParseStateId { text: String, reason: String },
    #[error("cannot parse rule {text:?}: {reason}")]
    ParseRule { text: String, reason: String },
    #[error("corrupt encoded data: {0}")]
    Decode(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
