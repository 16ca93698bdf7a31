use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pair index {index} out of range for a string of {len} pairs")]
    PairOutOfRange { index: usize, len: usize },

    #[error("BXOR source and target must differ (both {0})")]
    BxorSelfLoop(usize),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("subset index selects no bits")]
    EmptySubset,

    #[error("invalid {what}: {value}")]
    OutOfDomain { what: &'static str, value: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("gate {0} is not in the affine search repertoire")]
    UnsupportedGate(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("no pass probability: recurrence input is degenerate")]
    ZeroPassProbability,

    #[error("{rounds} rounds requested but only {available} available")]
    TooManyRounds { rounds: usize, available: usize },

    #[error("exact posterior limited to {max} pairs, got {n}")]
    TooManyPairs { n: usize, max: usize },

    #[error("purified pool exhausted after {0} rounds")]
    PoolExhausted(usize),

    #[error("verification failed: {0}")]
    Verification(String),
}
