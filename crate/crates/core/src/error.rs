use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("constellation file line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("duplicate label {0}")]
    DuplicateLabel(String),

    #[error("expected {expected} points, found {found}")]
    PointCount { expected: usize, found: usize },

    #[error("non-finite coordinate at line {line}")]
    NonFinite { line: usize },

    #[error("constellation mean energy is {0}, expected 1 (set normalize=1)")]
    NotNormalized(f64),

    #[error("expected a {expected}-bit word, got {found} bits")]
    WordLength { expected: usize, found: usize },

    #[error("bit count {bits} is not a multiple of the block size {block}")]
    BlockLength { bits: usize, block: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("{0}")]
    Format(String),

    #[error("bracket [{low_db}, {high_db}] dB does not straddle NGMI target {target}")]
    Bracket { low_db: f64, high_db: f64, target: f64 },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("threshold {0} not reached")]
    NotReached(f64),

    #[error("non-finite samples after propagation (overflow)")]
    Overflow,

    #[error("unknown format identifier `{0}`")]
    UnknownFormat(String),

    #[error("baseline format `{0}` missing from results")]
    MissingBaseline(String),

    #[error("{0}")]
    Config(String),

    #[error("i/o error on {path}: {reason}")]
    Io { path: String, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
