use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("CSV header is missing columns: {}", .missing.join(", "))]
    SchemaMismatch { missing: Vec<String> },

    #[error("row {row}: bad timestamp {value:?} ({reason})")]
    BadTimestamp {
        row: usize,
        value: String,
        reason: String,
    },

    #[error("readings belong to more than one sensor ({0} and {1})")]
    MixedSensors(String, String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("feature schema has no features")]
    EmptySchema,

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error("feature columns do not match the fitted model (expected {expected:?}, found {found:?})")]
    FeatureMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("singular linear system")]
    DegenerateMatrix,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("iteration limit of {0} reached")]
    MaxIterations(usize),

    #[error("{n} rows cannot be split into {folds} folds")]
    TooFewRows { n: usize, folds: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("backtest has no test rows")]
    EmptyTest,

    #[error("out-of-fold leakage: row {row} was in the training set of its own fold {fold}")]
    Leakage { row: usize, fold: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command line: 2 for bad input or
    /// configuration, 3 for failures during computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingFile(_)
            | Error::SchemaMismatch { .. }
            | Error::BadTimestamp { .. }
            | Error::MixedSensors(..)
            | Error::EmptyInput(_)
            | Error::EmptySchema
            | Error::UnknownColumn(_)
            | Error::InvalidParam(_)
            | Error::Config(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_) => 2,
            Error::FeatureMismatch { .. }
            | Error::DegenerateMatrix
            | Error::NonFinite(_)
            | Error::MaxIterations(_)
            | Error::TooFewRows { .. }
            | Error::LengthMismatch(..)
            | Error::ZeroVariance(_)
            | Error::EmptyTest
            | Error::Leakage { .. } => 3,
        }
    }
}
