use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("probability {value} outside {domain}")]
    ProbabilityDomain { value: f64, domain: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid construction: {0}")]
    Construction(String),
    #[error("target block-error rate {target:e} not bracketed by the grid (observed range {lo:e}..{hi:e})")]
    NotBracketed { target: f64, lo: f64, hi: f64 },
    #[error("distortion target {target} unreachable (best {best} with an empty quantizer frozen set)")]
    DistortionUnreachable { target: f64, best: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
