//! Behavioral trust (direct ANFIS estimate plus hop-discounted guarantees)
//! and data trust (deviation from history plus hop-discounted reports).

use std::collections::VecDeque;

use crate::anfis::AnfisModel;

use super::ledger::{
    compute_honesty, compute_intimacy, compute_rfi, InteractionLedger, IntimacyMode, NodeId,
};
use super::TrustError;

/// Indirect trust reported by a guarantor about an assessee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recommendation {
    pub guarantor: NodeId,
    pub assessee: NodeId,
    pub value: f64,
    /// Hops between the assessor and the guarantor; at least 1.
    pub hops: u32,
    /// Time at which the guarantor formed the value, in seconds.
    pub timestamp: f64,
}

impl Recommendation {
    pub fn new(
        guarantor: NodeId,
        assessee: NodeId,
        value: f64,
        hops: u32,
        timestamp: f64,
    ) -> Result<Self, TrustError> {
        if hops == 0 || !value.is_finite() {
            return Err(TrustError::InvalidRecommendation {
                guarantor,
                hops,
                value,
            });
        }
        Ok(Self {
            guarantor,
            assessee,
            value,
            hops,
            timestamp,
        })
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.hops as f64
    }
}

/// How a direct term and its weighted recommendations are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    /// `(direct + sum w_k v_k) / (1 + sum w_k)`, clamped to `[0, 1]`.
    #[default]
    Normalized,
    /// `direct + sum w_k v_k`, unbounded.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    /// `direct + sum w_k v_k` before normalization.
    pub raw: f64,
    pub value: f64,
}

/// Combines a direct term with `(value, weight)` pairs.
pub fn combine(
    direct: f64,
    weighted: impl IntoIterator<Item = (f64, f64)>,
    mode: Aggregation,
) -> Aggregate {
    let mut raw = direct;
    let mut weight_sum = 0.0;
    for (v, w) in weighted {
        raw += w * v;
        weight_sum += w;
    }
    let value = match mode {
        Aggregation::Raw => raw,
        Aggregation::Normalized => (raw / (1.0 + weight_sum)).clamp(0.0, 1.0),
    };
    Aggregate { raw, value }
}

/// The three behavioral properties of `assessee` as seen by `assessor`.
pub fn behavioral_inputs(
    ledger: &InteractionLedger,
    assessor: NodeId,
    assessee: NodeId,
    mode: IntimacyMode,
) -> Result<([f64; 3], bool), TrustError> {
    let rfi = compute_rfi(ledger, assessor, assessee);
    let intimacy = compute_intimacy(ledger, assessor, assessee, mode);
    let honesty = compute_honesty(ledger.counters(assessor, assessee))?;
    Ok(([rfi, intimacy.value, honesty], intimacy.degenerate))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehavioralTrust {
    pub inputs: [f64; 3],
    pub direct: f64,
    pub aggregate: Aggregate,
    pub degenerate_intimacy: bool,
}

/// Behavioral trust: the inference network's estimate from the assessor's
/// own evidence, plus guarantees weighted by `1 / hops`.
pub fn behavioral_trust(
    model: &AnfisModel,
    ledger: &InteractionLedger,
    recs: &[Recommendation],
    assessor: NodeId,
    assessee: NodeId,
    mode: IntimacyMode,
    aggregation: Aggregation,
) -> Result<BehavioralTrust, TrustError> {
    let (inputs, degenerate_intimacy) = behavioral_inputs(ledger, assessor, assessee, mode)?;
    let direct = model.evaluate(inputs)?;
    let aggregate = combine(
        direct,
        recs.iter().map(|r| (r.value, r.weight())),
        aggregation,
    );
    Ok(BehavioralTrust {
        inputs,
        direct,
        aggregate,
        degenerate_intimacy,
    })
}

/// Readings of one node over a sliding horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct DataHistory {
    samples: VecDeque<(f64, f64)>,
    horizon: f64,
    t_max: f64,
}

impl DataHistory {
    pub fn new(horizon: f64, t_max: f64) -> Result<Self, TrustError> {
        if !(t_max > 0.0) || !(horizon > 0.0) {
            return Err(TrustError::InvalidHistory { horizon, t_max });
        }
        Ok(Self {
            samples: VecDeque::new(),
            horizon,
            t_max,
        })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn push(&mut self, time: f64, reading: f64) {
        self.samples.push_back((time, reading));
        self.prune(time);
    }

    /// Drops samples older than the horizon relative to `now`.
    pub fn prune(&mut self, now: f64) {
        while self
            .samples
            .front()
            .is_some_and(|&(t, _)| t < now - self.horizon)
        {
            self.samples.pop_front();
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of the in-horizon readings.
    pub fn mean(&self) -> Option<f64> {
        if self.samples.is_empty() {
            None
        } else {
            Some(self.samples.iter().map(|s| s.1).sum::<f64>() / self.samples.len() as f64)
        }
    }
}

/// `t_max` when `value` equals the reference, `1 / |value - reference|`
/// otherwise, capped at `t_max`.
pub fn deviation_trust(value: f64, reference: f64, t_max: f64) -> f64 {
    let dev = (value - reference).abs();
    if dev == 0.0 {
        t_max
    } else {
        (1.0 / dev).min(t_max)
    }
}

pub fn direct_data_trust(reading: f64, history: &DataHistory) -> Result<f64, TrustError> {
    let his = history.mean().ok_or(TrustError::NoHistory)?;
    Ok(deviation_trust(reading, his, history.t_max))
}

/// Deviation trust of the mean of the guarantors' reports.
pub fn indirect_data_trust(reports: &[f64], history: &DataHistory) -> Result<f64, TrustError> {
    if reports.is_empty() {
        return Err(TrustError::NoReports);
    }
    let his = history.mean().ok_or(TrustError::NoHistory)?;
    let mean = reports.iter().sum::<f64>() / reports.len() as f64;
    Ok(deviation_trust(mean, his, history.t_max))
}

/// Down-weighting of old indirect data-trust values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Staleness {
    /// Every report counts fully regardless of age.
    None,
    /// Weight falls linearly from 1 at age 0 to 0 at `horizon` seconds.
    Linear { horizon: f64 },
}

impl Staleness {
    pub fn factor(&self, age: f64) -> f64 {
        match *self {
            Staleness::None => 1.0,
            Staleness::Linear { horizon } => {
                if horizon <= 0.0 {
                    0.0
                } else {
                    (1.0 - age.max(0.0) / horizon).max(0.0)
                }
            }
        }
    }
}

/// Indirect data-trust value from one guarantor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataRecommendation {
    pub value: f64,
    pub hops: u32,
    pub timestamp: f64,
}

/// Data trust: direct term plus reports weighted by `staleness / hops`.
pub fn data_trust(
    direct: f64,
    recs: &[DataRecommendation],
    now: f64,
    staleness: Staleness,
    aggregation: Aggregation,
) -> Aggregate {
    combine(
        direct,
        recs.iter()
            .filter(|r| r.hops > 0)
            .map(|r| (r.value, staleness.factor(now - r.timestamp) / r.hops as f64)),
        aggregation,
    )
}
