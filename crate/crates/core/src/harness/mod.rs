//! Experiment orchestration: training data, comparator sweeps, CSV output
//! and trend reports, plus the command line front end.

pub mod cli;
pub mod compare;
pub mod dataset;
pub mod experiment;

pub use compare::{
    compare_classifiers, score_classifier, ClassifierScore, Comparison, ComparisonSpec,
    CLASS_THRESHOLD,
};
pub use dataset::{
    gen_training_dataset, observed_features, Dataset, DatasetRow, LabelSource, ObserverChoice,
    TrainingDatasetSpec,
};
pub use experiment::{
    aggregate, parse_range, read_experiment, report, run_experiment, run_experiment_with,
    summary_table, train_default_model, verdicts, write_experiment, AggregateRow, Comparator,
    ExperimentResult, ExperimentSpec, RunRecord, Verdict, WORKERS_ENV,
};

use std::path::Path;

use thiserror::Error;

use crate::anfis::AnfisError;
use crate::metrics::MetricsError;
use crate::simnet::SimError;
use crate::trust::TrustError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("run failed at {variable}={point}, comparator {comparator}, seed {seed}: {source}")]
    RunFailed {
        variable: String,
        point: f64,
        comparator: String,
        seed: u64,
        source: Box<HarnessError>,
    },
    #[error("incomplete experiment directory; missing: {}", .0.join(", "))]
    Incomplete(Vec<String>),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Anfis(#[from] AnfisError),
    #[error(transparent)]
    Trust(#[from] TrustError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl HarnessError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}
