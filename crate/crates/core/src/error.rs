use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `position` is the 1-based token index in the input line.
    #[error("token {position} `{token}`: {reason}")]
    Parse {
        position: usize,
        token: String,
        reason: String,
    },

    #[error("invalid group spec `{text}`: {reason}")]
    GroupSpec { text: String, reason: String },

    #[error("cannot combine words over different alphabets ({left} vs {right})")]
    AlphabetMismatch { left: &'static str, right: &'static str },

    #[error("generator {name}{index} is not valid here: {reason}")]
    GeneratorOutOfRange { name: char, index: u32, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("the line solver needs a 1-dimensional base group (got rank {0})")]
    LineSolverDimension(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
