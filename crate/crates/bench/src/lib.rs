//! Benchmark harness for the `ghn` index: CSV ingestion, scaling, seeded
//! splits, timing and accuracy/recall reports against exact baselines.

pub mod dataset;
pub mod report;
pub mod run;
pub mod scale;
pub mod split;
pub mod synth;

use thiserror::Error;

pub use dataset::{load_csv, DatasetSpec, LabelColumn, LoadError, LoadedData, Task};
pub use report::{render, BenchReport, ReportFormat};
pub use run::{parse_algos, recall_at_k, run_bench, run_bench_split, Algo, BenchConfig, BenchOutcome, Predictions};
pub use scale::{apply_scaler, fit_scaler, Scaler, ScalerKind};
pub use split::split;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Load(#[from] LoadError),

    #[error(transparent)]
    Index(#[from] ghn::Error),

    #[error("split fraction {0} must lie strictly between 0 and 1")]
    BadFraction(f64),

    #[error("splitting {n} rows at {fraction} leaves one side empty")]
    DegenerateSplit { n: usize, fraction: f64 },

    #[error("k = {k} is not in 1..={train} (training rows)")]
    KTooLarge { k: usize, train: usize },

    #[error("repeats must be at least 1")]
    NoRepeats,

    #[error("no algorithms selected")]
    NoAlgos,

    #[error("training split is empty")]
    EmptyTrain,

    #[error("test split is empty")]
    EmptyTest,

    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),

    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}
