use thiserror::Error;

/// Errors produced by index construction, querying and persistence.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("point {point} has a non-finite coordinate on dimension {dim}")]
    NonFinite { point: usize, dim: usize },

    #[error("k = {k} is out of range for {n} training points")]
    InvalidK { k: usize, n: usize },

    #[error("cell count overflows for layer {layer} in {dim} dimensions")]
    CountOverflow { layer: u64, dim: usize },

    #[error("expected {expected} labels")]
    LabelKind { expected: &'static str },

    #[error("neighbor list is empty")]
    NoNeighbors,

    #[error("invalid grid parameters: {0}")]
    InvalidParams(String),

    #[error("corrupt index file: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
