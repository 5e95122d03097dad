use super::{AnfisError, MembershipFunction};

/// Number of inputs: relative frequency of interaction, intimacy, honesty.
pub const INPUT_COUNT: usize = 3;

/// Upper bound on linguistic terms per input.
pub const MAX_TERMS: usize = 8;

pub const INPUT_NAMES: [&str; INPUT_COUNT] = ["rfi", "intimacy", "honesty"];

/// Linguistic term labels for the supported term counts.
pub fn term_names(terms: usize) -> &'static [&'static str] {
    match terms {
        3 => &["low", "medium", "high"],
        5 => &["very_low", "low", "medium", "high", "very_high"],
        _ => &[],
    }
}

/// First-order Sugeno rule: `IF x1 is A AND x2 is B AND x3 is C THEN y = w.x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyRule {
    /// Membership-function index per input.
    pub antecedent: [usize; INPUT_COUNT],
    pub weights: [f64; INPUT_COUNT],
    pub bias: f64,
}

impl FuzzyRule {
    pub fn new(antecedent: [usize; INPUT_COUNT]) -> Self {
        Self {
            antecedent,
            weights: [0.0; INPUT_COUNT],
            bias: 0.0,
        }
    }

    pub fn consequent(&self, inputs: &[f64; INPUT_COUNT]) -> f64 {
        self.weights
            .iter()
            .zip(inputs)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.bias
    }
}

/// Per-layer values of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    /// Layer 1: membership degree of every term of every input.
    pub memberships: [Vec<f64>; INPUT_COUNT],
    /// Layer 2: rule firing strengths.
    pub firing: Vec<f64>,
    /// Layer 3: normalized firing strengths.
    pub normalized: Vec<f64>,
    /// Rule consequents `y_k` (before weighting).
    pub rule_outputs: Vec<f64>,
    /// Layer 4: `normalized[k] * rule_outputs[k]`.
    pub weighted: Vec<f64>,
    /// Layer 5 sum before clamping.
    pub raw_output: f64,
    /// Layer 5 after optional clamping to `[0, 1]`.
    pub output: f64,
}

/// Three-input first-order Takagi-Sugeno inference network.
#[derive(Debug, Clone, PartialEq)]
pub struct AnfisModel {
    mfs: [Vec<MembershipFunction>; INPUT_COUNT],
    rules: Vec<FuzzyRule>,
    clamp_output: bool,
}

impl AnfisModel {
    pub fn new(
        mfs: [Vec<MembershipFunction>; INPUT_COUNT],
        rules: Vec<FuzzyRule>,
        clamp_output: bool,
    ) -> Result<Self, AnfisError> {
        if rules.is_empty() {
            return Err(AnfisError::InvalidModel("rule base is empty".into()));
        }
        for (i, terms) in mfs.iter().enumerate() {
            if terms.is_empty() || terms.len() > MAX_TERMS {
                return Err(AnfisError::InvalidModel(format!(
                    "input {} has {} membership functions (allowed 1..={MAX_TERMS})",
                    INPUT_NAMES[i],
                    terms.len()
                )));
            }
        }
        for (k, rule) in rules.iter().enumerate() {
            for (i, &m) in rule.antecedent.iter().enumerate() {
                if m >= mfs[i].len() {
                    return Err(AnfisError::InvalidModel(format!(
                        "rule {k} references term {m} of input {} which has {} terms",
                        INPUT_NAMES[i],
                        mfs[i].len()
                    )));
                }
            }
            if rule
                .weights
                .iter()
                .chain([&rule.bias])
                .any(|v| !v.is_finite())
            {
                return Err(AnfisError::InvalidModel(format!(
                    "rule {k} has a non-finite consequent"
                )));
            }
        }
        Ok(Self {
            mfs,
            rules,
            clamp_output,
        })
    }

    /// Evenly spaced gaussian terms on `[0, 1]` (width = spacing / 2) and the
    /// full antecedent grid with zero consequents.
    pub fn grid(terms: usize) -> Result<Self, AnfisError> {
        let mfs = default_terms(terms)?;
        let rules = full_grid(terms).into_iter().map(FuzzyRule::new).collect();
        Self::new([mfs.clone(), mfs.clone(), mfs], rules, true)
    }

    pub fn membership_functions(&self) -> &[Vec<MembershipFunction>; INPUT_COUNT] {
        &self.mfs
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub(crate) fn rules_mut(&mut self) -> &mut [FuzzyRule] {
        &mut self.rules
    }

    pub fn clamp_output(&self) -> bool {
        self.clamp_output
    }

    pub fn set_clamp_output(&mut self, clamp: bool) {
        self.clamp_output = clamp;
    }

    pub fn term_count(&self, input: usize) -> usize {
        self.mfs[input].len()
    }

    pub fn forward(&self, inputs: [f64; INPUT_COUNT]) -> Result<ForwardTrace, AnfisError> {
        let memberships: [Vec<f64>; INPUT_COUNT] =
            std::array::from_fn(|i| self.mfs[i].iter().map(|mf| mf.eval(inputs[i])).collect());
        let firing: Vec<f64> = self
            .rules
            .iter()
            .map(|r| {
                (0..INPUT_COUNT)
                    .map(|i| memberships[i][r.antecedent[i]])
                    .product()
            })
            .collect();
        let total: f64 = firing.iter().sum();
        if !(total > 0.0) {
            return Err(AnfisError::Coverage { inputs });
        }
        let normalized: Vec<f64> = firing.iter().map(|w| w / total).collect();
        let rule_outputs: Vec<f64> = self.rules.iter().map(|r| r.consequent(&inputs)).collect();
        let weighted: Vec<f64> = normalized
            .iter()
            .zip(&rule_outputs)
            .map(|(w, y)| w * y)
            .collect();
        let raw_output: f64 = weighted.iter().sum();
        let output = if self.clamp_output {
            raw_output.clamp(0.0, 1.0)
        } else {
            raw_output
        };
        Ok(ForwardTrace {
            memberships,
            firing,
            normalized,
            rule_outputs,
            weighted,
            raw_output,
            output,
        })
    }

    /// Output of the forward pass without materializing the trace.
    pub fn evaluate(&self, inputs: [f64; INPUT_COUNT]) -> Result<f64, AnfisError> {
        let raw = self.evaluate_raw(inputs)?;
        Ok(if self.clamp_output {
            raw.clamp(0.0, 1.0)
        } else {
            raw
        })
    }

    pub(crate) fn evaluate_raw(&self, inputs: [f64; INPUT_COUNT]) -> Result<f64, AnfisError> {
        let mut mu = [[0.0f64; MAX_TERMS]; INPUT_COUNT];
        for i in 0..INPUT_COUNT {
            for (m, mf) in self.mfs[i].iter().enumerate() {
                mu[i][m] = mf.eval(inputs[i]);
            }
        }
        let mut total = 0.0;
        let mut acc = 0.0;
        for r in &self.rules {
            let a = r.antecedent;
            let w = mu[0][a[0]] * mu[1][a[1]] * mu[2][a[2]];
            total += w;
            acc += w * r.consequent(&inputs);
        }
        if !(total > 0.0) {
            return Err(AnfisError::Coverage { inputs });
        }
        Ok(acc / total)
    }

    /// Flattened premise parameters, ordered by input, term, then parameter.
    pub fn premise_params(&self) -> Vec<f64> {
        self.mfs
            .iter()
            .flatten()
            .flat_map(|mf| mf.params())
            .collect()
    }

    pub fn premise_param_count(&self) -> usize {
        self.mfs.iter().flatten().map(|mf| mf.param_count()).sum()
    }

    /// Returns a copy whose premise parameters are shifted by `delta`
    /// (same layout as [`premise_params`](Self::premise_params)).
    pub fn with_premise_shift(&self, delta: &[f64]) -> Self {
        let mut out = self.clone();
        let mut offset = 0;
        for terms in out.mfs.iter_mut() {
            for mf in terms.iter_mut() {
                let n = mf.param_count();
                *mf = mf.shifted(&delta[offset..offset + n]);
                offset += n;
            }
        }
        out
    }

    /// Keeps the `keep` rules with the largest cumulative firing strength over
    /// `inputs`, preserving the original rule order among survivors.
    pub fn prune_rules(
        &mut self,
        inputs: &[[f64; INPUT_COUNT]],
        keep: usize,
    ) -> Result<(), AnfisError> {
        if keep == 0 {
            return Err(AnfisError::InvalidModel(
                "cannot prune to zero rules".into(),
            ));
        }
        if keep >= self.rules.len() {
            return Ok(());
        }
        let mut strength = vec![0.0; self.rules.len()];
        for x in inputs {
            let trace = self.forward(*x)?;
            for (s, w) in strength.iter_mut().zip(&trace.firing) {
                *s += w;
            }
        }
        let mut order: Vec<usize> = (0..self.rules.len()).collect();
        order.sort_by(|&a, &b| strength[b].total_cmp(&strength[a]).then(a.cmp(&b)));
        let mut kept: Vec<usize> = order[..keep].to_vec();
        kept.sort_unstable();
        self.rules = kept.into_iter().map(|k| self.rules[k].clone()).collect();
        Ok(())
    }
}

pub(crate) fn default_terms(terms: usize) -> Result<Vec<MembershipFunction>, AnfisError> {
    if terms != 3 && terms != 5 {
        return Err(AnfisError::InvalidModel(format!(
            "supported term counts are 3 and 5, got {terms}"
        )));
    }
    let spacing = 1.0 / (terms - 1) as f64;
    (0..terms)
        .map(|m| MembershipFunction::gaussian(m as f64 * spacing, spacing / 2.0))
        .collect()
}

pub(crate) fn full_grid(terms: usize) -> Vec<[usize; INPUT_COUNT]> {
    let mut out = Vec::with_capacity(terms.pow(INPUT_COUNT as u32));
    for a in 0..terms {
        for b in 0..terms {
            for c in 0..terms {
                out.push([a, b, c]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_rule(bias: f64) -> AnfisModel {
        let mf = MembershipFunction::gaussian(0.5, 0.3).unwrap();
        let mut rule = FuzzyRule::new([0, 0, 0]);
        rule.bias = bias;
        AnfisModel::new([vec![mf], vec![mf], vec![mf]], vec![rule], true).unwrap()
    }

    #[test]
    fn single_constant_rule_returns_its_constant() {
        let model = one_rule(0.7);
        for x in [[0.0, 0.0, 0.0], [0.3, 0.9, 0.1], [1.0, 1.0, 1.0]] {
            assert!((model.forward(x).unwrap().output - 0.7).abs() < 1e-15);
        }
    }

    #[test]
    fn equal_strength_rules_average() {
        let mf = MembershipFunction::gaussian(0.5, 0.3).unwrap();
        let mut lo = FuzzyRule::new([0, 0, 0]);
        lo.bias = 0.2;
        let mut hi = FuzzyRule::new([1, 1, 1]);
        hi.bias = 0.8;
        let model = AnfisModel::new(
            [vec![mf, mf], vec![mf, mf], vec![mf, mf]],
            vec![lo, hi],
            true,
        )
        .unwrap();
        assert!((model.forward([0.1, 0.4, 0.9]).unwrap().output - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_has_full_rule_count() {
        assert_eq!(AnfisModel::grid(3).unwrap().rules().len(), 27);
        assert_eq!(AnfisModel::grid(5).unwrap().rules().len(), 125);
        assert!(AnfisModel::grid(4).is_err());
    }

    #[test]
    fn rejects_out_of_range_antecedent() {
        let mf = MembershipFunction::gaussian(0.5, 0.3).unwrap();
        let err = AnfisModel::new(
            [vec![mf], vec![mf], vec![mf]],
            vec![FuzzyRule::new([0, 1, 0])],
            true,
        );
        assert!(matches!(err, Err(AnfisError::InvalidModel(_))));
        let err = AnfisModel::new([vec![mf], vec![mf], vec![mf]], vec![], true);
        assert!(matches!(err, Err(AnfisError::InvalidModel(_))));
    }

    #[test]
    fn zero_firing_is_a_coverage_error() {
        let tri = MembershipFunction::triangular(0.0, 0.1, 0.2).unwrap();
        let model = AnfisModel::new(
            [vec![tri], vec![tri], vec![tri]],
            vec![FuzzyRule::new([0, 0, 0])],
            true,
        )
        .unwrap();
        match model.forward([0.9, 0.1, 0.1]) {
            Err(AnfisError::Coverage { inputs }) => assert_eq!(inputs, [0.9, 0.1, 0.1]),
            other => panic!("expected coverage error, got {other:?}"),
        }
        assert!(model.evaluate([0.9, 0.1, 0.1]).is_err());
    }

    #[test]
    fn clamping_keeps_raw_value_in_trace() {
        let model = one_rule(1.4);
        let trace = model.forward([0.2, 0.2, 0.2]).unwrap();
        assert_eq!(trace.output, 1.0);
        assert!((trace.raw_output - 1.4).abs() < 1e-15);
    }

    #[test]
    fn evaluate_agrees_with_forward() {
        let mut model = AnfisModel::grid(3).unwrap();
        for (k, r) in model.rules_mut().iter_mut().enumerate() {
            r.weights = [0.01 * k as f64, -0.02, 0.03];
            r.bias = 0.5 - 0.01 * k as f64;
        }
        let x = [0.3, 0.4, 0.6];
        assert!((model.forward(x).unwrap().output - model.evaluate(x).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn pruning_keeps_strongest_rules() {
        let mut model = AnfisModel::grid(3).unwrap();
        let inputs: Vec<[f64; 3]> = (0..20).map(|i| [0.05 * i as f64, 0.1, 0.9]).collect();
        model.prune_rules(&inputs, 9).unwrap();
        assert_eq!(model.rules().len(), 9);
        // Intimacy sits near "low" and honesty near "high" throughout.
        assert!(model
            .rules()
            .iter()
            .all(|r| r.antecedent[1] != 2 && r.antecedent[2] != 0));
        model.prune_rules(&inputs, 30).unwrap();
        assert_eq!(model.rules().len(), 9);
    }
}
