use thiserror::Error;

/// Errors produced by code construction, decoding and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("log2 block length {0} is out of range (0..=16)")]
    Size(u32),
    #[error("block length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid dimension: K = {k} for N = {n}")]
    InvalidDimension { n: usize, k: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
