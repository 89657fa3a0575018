use std::io;

use thiserror::Error;

use crate::model::PartitionViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("data set has zero Frobenius norm")]
    ZeroData,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("bundle must contain at least one subspace")]
    EmptyBundle,

    #[error("invalid partition: {0}")]
    InvalidPartition(PartitionViolation),

    #[error("invalid initial partition: {0}")]
    InvalidInit(PartitionViolation),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("{name} = {value} is out of range ({expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("enumeration requires {required} labelings, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("data set is not normalized (Frobenius norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// Process exit status for the CLI: 2 for bad input or config, 3 for an
    /// exceeded enumeration budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 3,
            _ => 2,
        }
    }
}
