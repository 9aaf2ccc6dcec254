use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no p-values supplied")]
    EmptyInput,

    #[error("p-value at index {index} is outside [0, 1]: {value}")]
    OutOfRange { index: usize, value: f64 },

    #[error("p-value at index {index} is not finite")]
    NotFinite { index: usize },

    #[error("significance level must lie strictly between 0 and 1, got {0}")]
    InvalidLevel(f64),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("length mismatch: expected {expected} hypotheses, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("at least 2 replicates are required, got {0}")]
    TooFewReplicates(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown sweep axis `{0}` (expected m, m0_fraction or level)")]
    InvalidAxis(String),

    #[error("sweep values must be nonempty and strictly increasing")]
    NotIncreasing,

    #[error("sweep point {value}: {source}")]
    AtPoint {
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
