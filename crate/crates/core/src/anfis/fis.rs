//! Untrained fuzzy inference comparator.
//!
//! Same fuzzification, rule and normalization layers as the trainable model,
//! but every rule carries a fixed singleton consequent chosen by hand: the
//! weighted centroid of its antecedent term levels. Nothing is learned.

use super::model::{default_terms, full_grid, INPUT_COUNT};
use super::{AnfisError, AnfisModel, FuzzyRule};

/// Expert weighting of the three inputs in the fixed consequents. Honesty is
/// the most direct evidence of misbehavior, so it dominates.
pub const DEFAULT_FIS_WEIGHTS: [f64; INPUT_COUNT] = [0.2, 0.2, 0.6];

/// Builds the fixed-parameter comparator for 3 or 5 linguistic terms.
///
/// A rule whose antecedent terms sit at levels `l_i` (the term centers on
/// `[0, 1]`) outputs the constant `sum_i weights[i] * l_i`.
pub fn fis_model(terms: usize, weights: [f64; INPUT_COUNT]) -> Result<AnfisModel, AnfisError> {
    let mfs = default_terms(terms)?;
    let level = |m: usize| m as f64 / (terms - 1) as f64;
    let rules = full_grid(terms)
        .into_iter()
        .map(|antecedent| {
            let mut rule = FuzzyRule::new(antecedent);
            rule.bias = (0..INPUT_COUNT)
                .map(|i| weights[i] * level(antecedent[i]))
                .sum();
            rule
        })
        .collect();
    AnfisModel::new([mfs.clone(), mfs.clone(), mfs], rules, true)
}

/// Output of the default comparator with `terms` linguistic terms per input.
pub fn fis_baseline(inputs: [f64; INPUT_COUNT], terms: usize) -> Result<f64, AnfisError> {
    fis_model(terms, DEFAULT_FIS_WEIGHTS)?.evaluate(inputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_point_gives_midpoint() {
        for terms in [3, 5] {
            let out = fis_baseline([0.5, 0.5, 0.5], terms).unwrap();
            assert!((out - 0.5).abs() < 1e-12, "{terms} terms: {out}");
        }
    }

    #[test]
    fn repeatable() {
        let x = [0.12, 0.77, 0.91];
        assert_eq!(
            fis_baseline(x, 3).unwrap().to_bits(),
            fis_baseline(x, 3).unwrap().to_bits()
        );
    }

    #[test]
    fn consequents_are_fixed_centroids() {
        let model = fis_model(3, [1.0, 0.0, 0.0]).unwrap();
        for rule in model.rules() {
            assert_eq!(rule.weights, [0.0; 3]);
            assert_eq!(rule.bias, rule.antecedent[0] as f64 * 0.5);
        }
    }

    #[test]
    fn honesty_drives_the_output() {
        let low = fis_baseline([0.2, 0.2, 0.1], 3).unwrap();
        let high = fis_baseline([0.2, 0.2, 0.95], 3).unwrap();
        assert!(high > low + 0.3);
    }
}
