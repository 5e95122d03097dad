//! Hybrid learning: least-squares consequents, gradient-descent premises.

use nalgebra::{DMatrix, DVector};

use super::model::INPUT_COUNT;
use super::{AnfisError, AnfisModel};

/// Cholesky pivots below this fraction of the largest diagonal entry are
/// treated as a rank-deficient system.
const PIVOT_TOLERANCE: f64 = 1e-13;

/// Largest number of learning-rate halvings tried within one epoch.
pub const MAX_HALVINGS: u32 = 10;

/// One supervised example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub inputs: [f64; INPUT_COUNT],
    pub target: f64,
}

impl Sample {
    pub fn new(inputs: [f64; INPUT_COUNT], target: f64) -> Self {
        Self { inputs, target }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub lse_regularization: f64,
    /// Recorded with the report; full-batch training itself draws no randomness.
    pub seed: u64,
    /// Slack on the per-epoch loss comparison, and the early-stop threshold
    /// on epoch-over-epoch improvement when positive.
    pub stop_tolerance: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            learning_rate: 0.05,
            lse_regularization: 1e-8,
            seed: 0,
            stop_tolerance: 1e-9,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), AnfisError> {
        if self.epochs == 0 {
            return Err(AnfisError::InvalidConfig(
                "epochs must be at least 1".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(AnfisError::InvalidConfig(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.lse_regularization >= 0.0) || !(self.stop_tolerance >= 0.0) {
            return Err(AnfisError::InvalidConfig(
                "lse_regularization and stop_tolerance must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    /// Mean squared error before any update.
    pub initial_loss: f64,
    /// Mean squared error at the end of each completed epoch.
    pub loss_history: Vec<f64>,
    /// Learning-rate halvings performed in each epoch.
    pub halvings: Vec<u32>,
    pub final_learning_rate: f64,
    pub seed: u64,
}

impl TrainingReport {
    pub fn initial_rmse(&self) -> f64 {
        self.initial_loss.sqrt()
    }

    pub fn final_rmse(&self) -> f64 {
        self.loss_history
            .last()
            .copied()
            .unwrap_or(self.initial_loss)
            .sqrt()
    }
}

/// Mean squared error of the unclamped output.
pub fn mse(model: &AnfisModel, data: &[Sample]) -> Result<f64, AnfisError> {
    if data.is_empty() {
        return Err(AnfisError::EmptyDataset);
    }
    let mut sum = 0.0;
    for s in data {
        let e = model.evaluate_raw(s.inputs)? - s.target;
        sum += e * e;
    }
    Ok(sum / data.len() as f64)
}

/// Layer-4 design matrix: for each sample and rule, `[wbar*x1, wbar*x2, wbar*x3, wbar]`.
pub fn design_matrix(model: &AnfisModel, data: &[Sample]) -> Result<DMatrix<f64>, AnfisError> {
    let cols = model.rules().len() * (INPUT_COUNT + 1);
    let mut x = DMatrix::zeros(data.len(), cols);
    for (row, s) in data.iter().enumerate() {
        let trace = model.forward(s.inputs)?;
        for (k, wbar) in trace.normalized.iter().enumerate() {
            let base = k * (INPUT_COUNT + 1);
            for i in 0..INPUT_COUNT {
                x[(row, base + i)] = wbar * s.inputs[i];
            }
            x[(row, base + INPUT_COUNT)] = *wbar;
        }
    }
    Ok(x)
}

/// Consequent parameters flattened as `[w_k1, w_k2, w_k3, b_k]` per rule.
pub fn consequent_params(model: &AnfisModel) -> Vec<f64> {
    model
        .rules()
        .iter()
        .flat_map(|r| r.weights.iter().copied().chain(std::iter::once(r.bias)))
        .collect()
}

fn set_consequents(model: &mut AnfisModel, theta: &[f64]) {
    for (rule, chunk) in model
        .rules_mut()
        .iter_mut()
        .zip(theta.chunks(INPUT_COUNT + 1))
    {
        rule.weights.copy_from_slice(&chunk[..INPUT_COUNT]);
        rule.bias = chunk[INPUT_COUNT];
    }
}

/// Solves for the consequent parameters minimizing the squared error with
/// the premise parameters held fixed, via ridge-regularized normal equations.
pub fn lse_consequents(
    model: &mut AnfisModel,
    data: &[Sample],
    ridge: f64,
) -> Result<(), AnfisError> {
    if data.is_empty() {
        return Err(AnfisError::EmptyDataset);
    }
    let x = design_matrix(model, data)?;
    let y = DVector::from_iterator(data.len(), data.iter().map(|s| s.target));
    let mut gram = x.transpose() * &x;
    for d in 0..gram.nrows() {
        gram[(d, d)] += ridge;
    }
    let rhs = x.transpose() * y;
    let scale = gram.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let chol = gram.cholesky().ok_or(AnfisError::SingularSystem)?;
    let l = chol.l();
    let min_pivot = l.diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v * v));
    if !(min_pivot > PIVOT_TOLERANCE * scale) {
        return Err(AnfisError::SingularSystem);
    }
    let theta = chol.solve(&rhs);
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(AnfisError::SingularSystem);
    }
    set_consequents(model, theta.as_slice());
    Ok(())
}

/// Gradient of [`mse`] with respect to the premise parameters, in
/// [`AnfisModel::premise_params`] order.
pub fn premise_gradient(model: &AnfisModel, data: &[Sample]) -> Result<Vec<f64>, AnfisError> {
    if data.is_empty() {
        return Err(AnfisError::EmptyDataset);
    }
    let mfs = model.membership_functions();
    // Offset of each (input, term) block in the flat parameter vector.
    let mut offsets: [Vec<usize>; INPUT_COUNT] = Default::default();
    let mut total = 0;
    for (i, terms) in mfs.iter().enumerate() {
        for mf in terms {
            offsets[i].push(total);
            total += mf.param_count();
        }
    }
    let mut grad = vec![0.0; total];
    let n = data.len() as f64;
    for s in data {
        let trace = model.forward(s.inputs)?;
        let strength: f64 = trace.firing.iter().sum();
        let dloss_dy = 2.0 * (trace.raw_output - s.target) / n;
        // dL/dmu for every (input, term).
        let mut dmu: [Vec<f64>; INPUT_COUNT] = std::array::from_fn(|i| vec![0.0; mfs[i].len()]);
        for (k, rule) in model.rules().iter().enumerate() {
            let dy_dw = (trace.rule_outputs[k] - trace.raw_output) / strength;
            for i in 0..INPUT_COUNT {
                let others: f64 = (0..INPUT_COUNT)
                    .filter(|&o| o != i)
                    .map(|o| trace.memberships[o][rule.antecedent[o]])
                    .product();
                dmu[i][rule.antecedent[i]] += dloss_dy * dy_dw * others;
            }
        }
        for i in 0..INPUT_COUNT {
            for (m, mf) in mfs[i].iter().enumerate() {
                if dmu[i][m] == 0.0 {
                    continue;
                }
                for (p, g) in mf.gradient(s.inputs[i]).into_iter().enumerate() {
                    grad[offsets[i][m] + p] += dmu[i][m] * g;
                }
            }
        }
    }
    Ok(grad)
}

/// Hybrid training. Each epoch solves the consequents by least squares, then
/// takes one gradient step on the premise parameters. A step that raises the
/// loss is retried with the learning rate halved (at most [`MAX_HALVINGS`]
/// times) and abandoned if it still does not help.
pub fn train_hybrid(
    model: &AnfisModel,
    data: &[Sample],
    config: &TrainingConfig,
) -> Result<(AnfisModel, TrainingReport), AnfisError> {
    config.validate()?;
    if data.is_empty() {
        return Err(AnfisError::EmptyDataset);
    }
    let mut current = model.clone();
    let initial_loss = mse(&current, data)?;
    let mut lr = config.learning_rate;
    let mut prev = initial_loss;
    let mut loss_history = Vec::with_capacity(config.epochs);
    let mut halvings = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        let mut candidate = current.clone();
        lse_consequents(&mut candidate, data, config.lse_regularization)?;
        let mut loss = mse(&candidate, data)?;
        if !loss.is_finite() {
            return Err(AnfisError::TrainingDiverged { epoch });
        }
        // The ridge term means the solve is not exactly the SSE minimizer.
        if loss > prev {
            candidate = current.clone();
            loss = prev;
        }

        let grad = premise_gradient(&candidate, data)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(AnfisError::TrainingDiverged { epoch });
        }
        let mut halved = 0;
        loop {
            let step: Vec<f64> = grad.iter().map(|g| -lr * g).collect();
            let stepped = candidate.with_premise_shift(&step);
            let stepped_loss = match mse(&stepped, data) {
                Ok(v) if v.is_finite() => Some(v),
                Ok(_) | Err(AnfisError::Coverage { .. }) => None,
                Err(e) => return Err(e),
            };
            if let Some(v) = stepped_loss.filter(|&v| v <= loss) {
                candidate = stepped;
                loss = v;
                break;
            }
            if halved == MAX_HALVINGS {
                break;
            }
            lr *= 0.5;
            halved += 1;
        }

        current = candidate;
        loss_history.push(loss);
        halvings.push(halved);
        let improvement = prev - loss;
        prev = loss;
        if config.stop_tolerance > 0.0 && epoch > 0 && improvement < config.stop_tolerance {
            break;
        }
    }

    let report = TrainingReport {
        initial_loss,
        loss_history,
        halvings,
        final_learning_rate: lr,
        seed: config.seed,
    };
    Ok((current, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anfis::{FuzzyRule, MembershipFunction};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_data(rng: &mut ChaCha8Rng, n: usize) -> Vec<Sample> {
        (0..n)
            .map(|_| {
                let x: [f64; 3] = [rng.random(), rng.random(), rng.random()];
                let t = (3.0f64 * x[0]).sin() * 0.3 + x[2] * x[1] + rng.random_range(-0.05..0.05);
                Sample::new(x, t)
            })
            .collect()
    }

    #[test]
    fn constant_targets_fit_by_bias_alone() {
        let mf = MembershipFunction::gaussian(0.5, 0.4).unwrap();
        let mut model = AnfisModel::new(
            [vec![mf], vec![mf], vec![mf]],
            vec![FuzzyRule::new([0, 0, 0])],
            true,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<Sample> = (0..30)
            .map(|_| Sample::new([rng.random(), rng.random(), rng.random()], 0.5))
            .collect();
        lse_consequents(&mut model, &data, 1e-14).unwrap();
        let r = &model.rules()[0];
        assert!((r.bias - 0.5).abs() < 1e-9, "bias {}", r.bias);
        assert!(r.weights.iter().all(|w| w.abs() < 1e-9));
    }

    #[test]
    fn fitted_model_is_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut model = AnfisModel::grid(3).unwrap();
        let data = random_data(&mut rng, 400);
        lse_consequents(&mut model, &data, 0.0).unwrap();
        let before = consequent_params(&model);
        // Replace targets by the model's own output: the residual is zero.
        let own: Vec<Sample> = data
            .iter()
            .map(|s| Sample::new(s.inputs, model.evaluate_raw(s.inputs).unwrap()))
            .collect();
        lse_consequents(&mut model, &own, 0.0).unwrap();
        let after = consequent_params(&model);
        let drift = before
            .iter()
            .zip(&after)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(drift < 1e-6, "drift {drift}");
        assert!(mse(&model, &own).unwrap() < 1e-20);
    }

    #[test]
    fn rank_deficient_without_ridge_is_singular() {
        let mut model = AnfisModel::grid(3).unwrap();
        // Five samples cannot determine 108 consequent parameters.
        let data: Vec<Sample> = (0..5)
            .map(|i| Sample::new([0.1 * i as f64, 0.2, 0.3], 0.4))
            .collect();
        assert!(matches!(
            lse_consequents(&mut model, &data, 0.0),
            Err(AnfisError::SingularSystem)
        ));
        lse_consequents(&mut model, &data, 1e-6).unwrap();
    }

    #[test]
    fn zero_epochs_rejected() {
        let cfg = TrainingConfig {
            epochs: 0,
            ..TrainingConfig::default()
        };
        let data = vec![Sample::new([0.1, 0.2, 0.3], 0.5)];
        assert!(matches!(
            train_hybrid(&AnfisModel::grid(3).unwrap(), &data, &cfg),
            Err(AnfisError::InvalidConfig(_))
        ));
        let cfg = TrainingConfig {
            learning_rate: 0.0,
            ..TrainingConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn empty_dataset_rejected() {
        let mut model = AnfisModel::grid(3).unwrap();
        assert!(matches!(
            lse_consequents(&mut model, &[], 1e-8),
            Err(AnfisError::EmptyDataset)
        ));
        assert!(matches!(
            train_hybrid(&model, &[], &TrainingConfig::default()),
            Err(AnfisError::EmptyDataset)
        ));
    }

    #[test]
    fn one_epoch_on_perfect_fit_keeps_loss_near_zero() {
        let mf = MembershipFunction::gaussian(0.5, 0.4).unwrap();
        let mut rule = FuzzyRule::new([0, 0, 0]);
        rule.bias = 0.3;
        rule.weights = [0.2, 0.0, 0.1];
        let model = AnfisModel::new([vec![mf], vec![mf], vec![mf]], vec![rule], false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<Sample> = (0..40)
            .map(|_| {
                let x = [rng.random(), rng.random(), rng.random()];
                Sample::new(x, model.evaluate_raw(x).unwrap())
            })
            .collect();
        let cfg = TrainingConfig {
            epochs: 1,
            ..TrainingConfig::default()
        };
        let (_, report) = train_hybrid(&model, &data, &cfg).unwrap();
        assert!(report.initial_loss < 1e-28);
        assert!(report.loss_history[0] < 1e-16);
    }

    #[test]
    fn loss_history_is_monotone_and_training_helps() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let data = random_data(&mut rng, 200);
        let cfg = TrainingConfig {
            epochs: 15,
            learning_rate: 0.5,
            stop_tolerance: 0.0,
            ..Default::default()
        };
        let (trained, report) = train_hybrid(&AnfisModel::grid(3).unwrap(), &data, &cfg).unwrap();
        for pair in report.loss_history.windows(2) {
            assert!(pair[1] <= pair[0] + cfg.stop_tolerance);
        }
        assert!(report.final_rmse() < report.initial_rmse());
        assert_eq!(
            mse(&trained, &data).unwrap(),
            *report.loss_history.last().unwrap()
        );
    }
}
