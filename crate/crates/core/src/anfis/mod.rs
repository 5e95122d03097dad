//! Adaptive neuro-fuzzy inference for behavioral trust.
//!
//! A first-order Takagi-Sugeno network with five layers (fuzzification,
//! product rule, normalization, linear consequents, summation) maps the
//! three behavioral properties (relative frequency of interaction, intimacy,
//! honesty) to a trust level. Training alternates a least-squares solve for
//! the consequents with a gradient step on the membership parameters.

mod fis;
mod membership;
mod model;
pub mod persist;
mod train;

pub use fis::{fis_baseline, fis_model, DEFAULT_FIS_WEIGHTS};
pub use membership::MembershipFunction;
pub use model::{
    term_names, AnfisModel, ForwardTrace, FuzzyRule, INPUT_COUNT, INPUT_NAMES, MAX_TERMS,
};
pub use train::{
    consequent_params, design_matrix, lse_consequents, mse, premise_gradient, train_hybrid, Sample,
    TrainingConfig, TrainingReport, MAX_HALVINGS,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnfisError {
    #[error("invalid membership function: {0}")]
    InvalidMembership(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("no rule fires for input {inputs:?}")]
    Coverage { inputs: [f64; INPUT_COUNT] },
    #[error("least-squares system is singular; use a nonzero ridge term")]
    SingularSystem,
    #[error("training diverged at epoch {epoch}")]
    TrainingDiverged { epoch: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("model file line {line}: {message}")]
    Parse { line: usize, message: String },
}
