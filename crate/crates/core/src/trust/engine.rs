//! Per-network trust bookkeeping driven by completed interactions.

use crate::anfis::AnfisModel;

use super::aggregate::{
    behavioral_trust, data_trust, deviation_trust, Aggregation, DataHistory, DataRecommendation,
    Recommendation, Staleness,
};
use super::audit::AuditRecord;
use super::ledger::{InteractionLedger, IntimacyMode, NodeId, Outcome};
use super::state::{classify, Classification, TrustState};
use super::TrustError;

#[derive(Debug, Clone, PartialEq)]
pub struct TrustParams {
    pub intimacy_mode: IntimacyMode,
    pub aggregation: Aggregation,
    pub staleness: Staleness,
    pub threshold: f64,
    pub t_max: f64,
    /// Span of readings averaged into a node's historical value, seconds.
    pub history_horizon: f64,
    /// Tumbling observation window for interaction counts; `None` = whole run.
    pub window_len: Option<f64>,
}

impl Default for TrustParams {
    fn default() -> Self {
        Self {
            intimacy_mode: IntimacyMode::Normalized,
            aggregation: Aggregation::Normalized,
            staleness: Staleness::Linear { horizon: 5.0 },
            threshold: 1.0,
            t_max: 1.0,
            history_horizon: 10.0,
            window_len: None,
        }
    }
}

/// Ledger, data histories, shared trust states and each node's latest
/// direct opinion of every other node.
#[derive(Debug, Clone)]
pub struct TrustEngine {
    params: TrustParams,
    ledger: InteractionLedger,
    histories: Vec<DataHistory>,
    states: Vec<TrustState>,
    /// `opinions[k * n + j]`: k's latest direct behavioral estimate of j and its time.
    opinions: Vec<Option<(f64, f64)>>,
    /// When set, only trusted nodes update shared states or act as guarantors.
    gated: bool,
}

impl TrustEngine {
    /// `initial[j]` seeds node j's (behavioral, data) trust.
    pub fn new(params: TrustParams, initial: &[(f64, f64)]) -> Result<Self, TrustError> {
        let n = initial.len();
        let history = DataHistory::new(params.history_horizon, params.t_max)?;
        let ledger = match params.window_len {
            Some(w) => InteractionLedger::with_window(n, w),
            None => InteractionLedger::new(n),
        };
        let states = initial
            .iter()
            .map(|&(b, d)| TrustState::new(b, d, params.threshold, 0.0))
            .collect();
        Ok(Self {
            histories: vec![history; n],
            states,
            opinions: vec![None; n * n],
            ledger,
            params,
            gated: true,
        })
    }

    /// Turns the trusted-assessor gate on or off (on by default). With it off,
    /// every evaluation is applied and every node may recommend.
    pub fn set_gated(&mut self, gated: bool) {
        self.gated = gated;
    }

    pub fn gated(&self) -> bool {
        self.gated
    }

    fn counts(&self, node: NodeId) -> bool {
        !self.gated || self.is_trusted(node)
    }

    pub fn params(&self) -> &TrustParams {
        &self.params
    }

    pub fn ledger(&self) -> &InteractionLedger {
        &self.ledger
    }

    pub fn history(&self, node: NodeId) -> &DataHistory {
        &self.histories[node]
    }

    pub fn state(&self, node: NodeId) -> &TrustState {
        &self.states[node]
    }

    pub fn states(&self) -> &[TrustState] {
        &self.states
    }

    pub fn classification(&self, node: NodeId) -> Classification {
        self.states[node].classification
    }

    pub fn is_trusted(&self, node: NodeId) -> bool {
        self.classification(node) == Classification::Trusted
    }

    pub fn opinion(&self, assessor: NodeId, assessee: NodeId) -> Option<(f64, f64)> {
        self.opinions[assessor * self.states.len() + assessee]
    }

    /// Records an interaction without evaluating trust.
    pub fn observe(
        &mut self,
        assessor: NodeId,
        assessee: NodeId,
        outcome: Outcome,
        duration: f64,
        reading: Option<f64>,
        now: f64,
    ) {
        self.ledger
            .record(assessor, assessee, outcome, duration, now);
        if let Some(r) = reading {
            self.ledger.record_reading(assessor, assessee, r, now);
            self.histories[assessee].push(now, r);
        }
    }

    /// Records an interaction and re-evaluates the assessee from the
    /// assessor's point of view.
    ///
    /// The reading is judged against the history gathered before it and only
    /// then appended. The result replaces the shared state of the assessee
    /// only when the assessor is itself trusted; guarantors must be trusted
    /// and reachable (`hops` returns `Some`) to be consulted.
    #[allow(clippy::too_many_arguments)]
    pub fn interact(
        &mut self,
        model: &AnfisModel,
        assessor: NodeId,
        assessee: NodeId,
        outcome: Outcome,
        duration: f64,
        reading: f64,
        now: f64,
        hops: impl Fn(NodeId) -> Option<u32>,
    ) -> Result<AuditRecord, TrustError> {
        self.ledger
            .record(assessor, assessee, outcome, duration, now);
        self.histories[assessee].prune(now);
        let record = self.evaluate(model, assessor, assessee, reading, now, hops)?;
        self.ledger.record_reading(assessor, assessee, reading, now);
        self.histories[assessee].push(now, reading);
        Ok(record)
    }

    /// Re-evaluates the assessee using the latest reading the assessor holds
    /// from it, for periodic update cadences. `None` if there is none.
    pub fn reevaluate(
        &mut self,
        model: &AnfisModel,
        assessor: NodeId,
        assessee: NodeId,
        now: f64,
        hops: impl Fn(NodeId) -> Option<u32>,
    ) -> Result<Option<AuditRecord>, TrustError> {
        let Some((_, reading)) = self.ledger.pair(assessor, assessee).last_reading else {
            return Ok(None);
        };
        self.histories[assessee].prune(now);
        self.evaluate(model, assessor, assessee, reading, now, hops)
            .map(Some)
    }

    fn evaluate(
        &mut self,
        model: &AnfisModel,
        assessor: NodeId,
        assessee: NodeId,
        reading: f64,
        now: f64,
        hops: impl Fn(NodeId) -> Option<u32>,
    ) -> Result<AuditRecord, TrustError> {
        let n = self.states.len();
        let history = &self.histories[assessee];
        let history_mean = history.mean();
        let mut behavioral_recs = Vec::new();
        let mut data_recs = Vec::new();
        for k in 0..n {
            if k == assessor || k == assessee || !self.counts(k) {
                continue;
            }
            let Some(h) = hops(k).filter(|&h| h > 0) else {
                continue;
            };
            // Only opinions still inside the staleness horizon are solicited.
            if let Some((value, t)) = self.opinions[k * n + assessee]
                .filter(|&(_, t)| self.params.staleness.factor(now - t) > 0.0)
            {
                behavioral_recs.push(Recommendation::new(k, assessee, value, h, t)?);
            }
            if let (Some((t, r)), Some(his)) =
                (self.ledger.pair(k, assessee).last_reading, history_mean)
            {
                let value = deviation_trust(r, his, self.params.t_max);
                data_recs.push(DataRecommendation {
                    value,
                    hops: h,
                    timestamp: t,
                });
            }
        }

        let b = behavioral_trust(
            model,
            &self.ledger,
            &behavioral_recs,
            assessor,
            assessee,
            self.params.intimacy_mode,
            self.params.aggregation,
        )?;
        // Without history the reading cannot be judged: neutral direct trust.
        let direct_data = match history_mean {
            Some(his) => deviation_trust(reading, his, self.params.t_max),
            None => 0.5 * self.params.t_max,
        };
        let d = data_trust(
            direct_data,
            &data_recs,
            now,
            self.params.staleness,
            self.params.aggregation,
        );

        self.opinions[assessor * n + assessee] = Some((b.direct, now));
        let total = b.aggregate.value + d.value;
        let classification = classify(total, self.params.threshold);
        let applied = self.counts(assessor);
        if applied {
            self.states[assessee] = TrustState {
                behavioral: b.aggregate.value,
                data: d.value,
                total,
                classification,
                last_update: now,
            };
        }
        Ok(AuditRecord {
            time: now,
            assessor,
            assessee,
            rfi: b.inputs[0],
            intimacy: b.inputs[1],
            honesty: b.inputs[2],
            direct_behavioral: b.direct,
            behavioral_recs: behavioral_recs.len(),
            behavioral_raw: b.aggregate.raw,
            behavioral: b.aggregate.value,
            reading,
            history_mean,
            direct_data,
            data_recs: data_recs.len(),
            data_raw: d.raw,
            data: d.value,
            total,
            classification,
            applied,
            degenerate_intimacy: b.degenerate_intimacy,
        })
    }
}
