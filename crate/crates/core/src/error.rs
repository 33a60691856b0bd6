use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty variable selection")]
    EmptySelection,

    #[error("variable index {index} out of range for {n_vars} variables")]
    VariableOutOfRange { index: usize, n_vars: usize },

    #[error("duplicate variable index {0} in selection")]
    DuplicateVariable(usize),

    #[error("variable sets overlap on index {0}")]
    OverlappingSets(usize),

    #[error("symbol {symbol} out of range for variable {variable} with cardinality {cardinality}")]
    SymbolOutOfRange {
        variable: usize,
        symbol: usize,
        cardinality: usize,
    },

    #[error("cardinality of variable {0} must be at least 1")]
    ZeroCardinality(usize),

    #[error("joint state space exceeds 64-bit indexing")]
    StateSpaceTooLarge,

    #[error("negative or non-finite probability {0}")]
    InvalidProbability(f64),

    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("state has zero probability")]
    ZeroProbability,

    #[error("KL divergence undefined: q assigns zero mass to a state with p = {0}")]
    SupportViolation(f64),

    #[error("alphabets differ")]
    AlphabetMismatch,

    #[error("grouping is not a partition of the variables: {0}")]
    NotAPartition(String),

    #[error("series too short: need more than {needed} rows, have {available}")]
    SeriesTooShort { needed: usize, available: usize },

    #[error("ragged data: row {row} has {found} fields, expected {expected}")]
    Ragged {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("system too large: {0}")]
    TooLarge(String),

    #[error("singular covariance matrix")]
    SingularCovariance,

    #[error("column {0} has zero variance")]
    ZeroVariance(usize),

    #[error("empty null distribution")]
    EmptyNulls,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
