use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid cycle power C_{n}^{k}: need n >= 3 and k >= 1")]
    InvalidGraph { n: usize, k: usize },

    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("segment of length {length} does not fit in a cycle of {n} vertices")]
    SegmentTooLong { length: usize, n: usize },

    #[error("invalid list parameters: need 1 <= c <= s (got c = {c}, s = {s})")]
    InvalidParams { c: usize, s: usize },

    #[error("scheme has {got} lists but the graph has {expected} vertices")]
    SizeMismatch { expected: usize, got: usize },

    #[error("invalid list at vertex {vertex}: {reason}")]
    InvalidList { vertex: usize, reason: String },

    #[error("instance too large for exhaustive search ({combinations} list selections)")]
    InstanceTooLarge { combinations: f64 },

    #[error("parameters outside the supported regime: {0}")]
    OutOfRegime(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
