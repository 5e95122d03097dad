//! Trained model versus the fixed-rule baseline on held-out generated data.

use crate::anfis::{
    fis_model, train_hybrid, AnfisModel, TrainingConfig, TrainingReport, DEFAULT_FIS_WEIGHTS,
};
use crate::metrics::{accuracy, f_measure, ConfusionCounts, RecallConvention};

use super::{gen_training_dataset, Dataset, HarnessError, TrainingDatasetSpec};

/// Model outputs below this are classified malicious.
pub const CLASS_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSpec {
    pub terms: usize,
    pub train: TrainingDatasetSpec,
    /// Must use seeds disjoint from `train`.
    pub test: TrainingDatasetSpec,
    pub training: TrainingConfig,
}

impl Default for ComparisonSpec {
    fn default() -> Self {
        let base = TrainingDatasetSpec::default();
        Self {
            terms: 3,
            train: TrainingDatasetSpec {
                scenarios: 10,
                seed: 1,
                ..base.clone()
            },
            test: TrainingDatasetSpec {
                scenarios: 5,
                seed: 101,
                ..base
            },
            training: TrainingConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierScore {
    pub confusion: ConfusionCounts,
    pub accuracy: Option<f64>,
    pub f_measure: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub terms: usize,
    pub anfis: ClassifierScore,
    pub fis: ClassifierScore,
    pub model: AnfisModel,
    pub report: TrainingReport,
    pub train_rows: usize,
    pub test_rows: usize,
}

/// Confusion over dataset rows, positives being malicious rows.
pub fn score_classifier(
    model: &AnfisModel,
    data: &Dataset,
) -> Result<ClassifierScore, HarnessError> {
    let mut c = ConfusionCounts::default();
    for row in &data.rows {
        c.add(model.evaluate(row.inputs)? < CLASS_THRESHOLD, row.malicious);
    }
    Ok(ClassifierScore {
        confusion: c,
        accuracy: accuracy(&c),
        f_measure: f_measure(&c, RecallConvention::Standard),
    })
}

pub fn compare_classifiers(spec: &ComparisonSpec) -> Result<Comparison, HarnessError> {
    let train = gen_training_dataset(&spec.train)?;
    let test = gen_training_dataset(&spec.test)?;
    let (model, report) = train_hybrid(
        &AnfisModel::grid(spec.terms)?,
        &train.samples(),
        &spec.training,
    )?;
    let fis = fis_model(spec.terms, DEFAULT_FIS_WEIGHTS)?;
    Ok(Comparison {
        terms: spec.terms,
        anfis: score_classifier(&model, &test)?,
        fis: score_classifier(&fis, &test)?,
        model,
        report,
        train_rows: train.len(),
        test_rows: test.len(),
    })
}
