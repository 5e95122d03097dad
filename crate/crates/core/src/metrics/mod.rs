//! Performance metrics computed from an [`EventLog`]: packet forwarding
//! ratio, throughput, trust energy ratio, and detection quality.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::simnet::{Energy, EventLog, LogEntry, PacketKind};
use crate::trust::{Classification, NodeId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("predictions and ground truth cover different node sets")]
    InputMismatch,
    #[error("interval must be > 0, got {0}")]
    InvalidInterval(f64),
}

/// Data packet fates for one flow.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlowCounts {
    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub inflight: u64,
}

pub fn flow_counts(log: &EventLog) -> BTreeMap<usize, FlowCounts> {
    let mut out: BTreeMap<usize, FlowCounts> = BTreeMap::new();
    for e in &log.entries {
        match e {
            LogEntry::Gen { flow, .. } => out.entry(*flow).or_default().generated += 1,
            LogEntry::Deliver { flow, .. } => out.entry(*flow).or_default().delivered += 1,
            LogEntry::Drop {
                kind: PacketKind::Data,
                flow: Some(flow),
                ..
            } => out.entry(*flow).or_default().dropped += 1,
            LogEntry::Inflight { flow, .. } => out.entry(*flow).or_default().inflight += 1,
            _ => {}
        }
    }
    out
}

pub fn totals(log: &EventLog) -> FlowCounts {
    flow_counts(log)
        .values()
        .fold(FlowCounts::default(), |a, c| FlowCounts {
            generated: a.generated + c.generated,
            delivered: a.delivered + c.delivered,
            dropped: a.dropped + c.dropped,
            inflight: a.inflight + c.inflight,
        })
}

/// Packets received over packets sent; `None` when nothing was sent.
pub fn pfr(log: &EventLog) -> Option<f64> {
    let t = totals(log);
    pfr_from_counts(t.delivered, t.generated)
}

pub fn pfr_from_counts(received: u64, sent: u64) -> Option<f64> {
    (sent > 0).then(|| received as f64 / sent as f64)
}

/// Successful deliveries per second over `interval` seconds.
pub fn net_throughput(log: &EventLog, interval: f64) -> Result<f64, MetricsError> {
    throughput_from_count(totals(log).delivered, interval)
}

pub fn throughput_from_count(delivered: u64, interval: f64) -> Result<f64, MetricsError> {
    if !(interval > 0.0) {
        return Err(MetricsError::InvalidInterval(interval));
    }
    Ok(delivered as f64 / interval)
}

pub fn energy_by_node(log: &EventLog) -> Vec<Energy> {
    let mut e = vec![Energy::default(); log.node_count];
    for entry in &log.entries {
        match entry {
            LogEntry::Tx { node, energy, .. } => e[*node].send += energy,
            LogEntry::Rx { node, energy, .. } => e[*node].rec += energy,
            LogEntry::Eval {
                assessor, energy, ..
            } => e[*assessor].te += energy,
            _ => {}
        }
    }
    e
}

/// Trust-evaluation energy over transmission energy; `None` when no
/// transmission energy was spent.
pub fn aecr_from_energy(te: f64, send: f64, rec: f64) -> Option<f64> {
    let tx = send + rec;
    (tx > 0.0).then(|| te / tx)
}

pub fn aecr(log: &EventLog) -> Option<f64> {
    let (mut te, mut send, mut rec) = (0.0, 0.0, 0.0);
    for e in energy_by_node(log) {
        te += e.te;
        send += e.send;
        rec += e.rec;
    }
    aecr_from_energy(te, send, rec)
}

pub fn node_aecr(log: &EventLog) -> Vec<Option<f64>> {
    energy_by_node(log)
        .iter()
        .map(|e| aecr_from_energy(e.te, e.send, e.rec))
        .collect()
}

/// Positives are malicious nodes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn population(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn add(&mut self, predicted_malicious: bool, malicious: bool) {
        match (predicted_malicious, malicious) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }
}

/// Both inputs map node id to "malicious"; they must cover the same nodes.
pub fn confusion(
    predicted: &[(NodeId, bool)],
    truth: &[(NodeId, bool)],
) -> Result<ConfusionCounts, MetricsError> {
    let p: BTreeMap<NodeId, bool> = predicted.iter().copied().collect();
    let t: BTreeMap<NodeId, bool> = truth.iter().copied().collect();
    if p.len() != predicted.len() || t.len() != truth.len() || !p.keys().eq(t.keys()) {
        return Err(MetricsError::InputMismatch);
    }
    let mut c = ConfusionCounts::default();
    for (id, &pm) in &p {
        c.add(pm, t[id]);
    }
    Ok(c)
}

/// Confusion of the final classifications in a trust-enabled log against its roles.
pub fn confusion_from_log(log: &EventLog) -> Option<ConfusionCounts> {
    let classes = log.final_classes()?;
    let mut c = ConfusionCounts::default();
    for (class, role) in classes.iter().zip(log.roles()) {
        c.add(*class == Classification::Untrusted, role.is_malicious());
    }
    Some(c)
}

pub fn accuracy(c: &ConfusionCounts) -> Option<f64> {
    let n = c.population();
    (n > 0).then(|| (c.tp + c.tn) as f64 / n as f64)
}

pub fn precision(c: &ConfusionCounts) -> Option<f64> {
    let d = c.tp + c.fp;
    (d > 0).then(|| c.tp as f64 / d as f64)
}

pub fn recall(c: &ConfusionCounts) -> Option<f64> {
    let d = c.tp + c.fn_;
    (d > 0).then(|| c.tp as f64 / d as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecallConvention {
    /// TP / (TP + FN).
    #[default]
    Standard,
    /// TP / (TP + TN), a nonstandard variant kept for comparison.
    OverTpTn,
}

/// Harmonic mean of precision and recall; `None` when either is undefined
/// or both are zero.
pub fn f_measure(c: &ConfusionCounts, convention: RecallConvention) -> Option<f64> {
    let p = precision(c)?;
    let r = match convention {
        RecallConvention::Standard => recall(c)?,
        RecallConvention::OverTpTn => {
            let d = c.tp + c.tn;
            (d > 0).then(|| c.tp as f64 / d as f64)?
        }
    };
    (p + r > 0.0).then(|| 2.0 * p * r / (p + r))
}

/// Metrics of one run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricReport {
    pub generated: u64,
    pub delivered: u64,
    pub pfr: Option<f64>,
    pub net_throughput: f64,
    pub aecr: Option<f64>,
    pub accuracy: Option<f64>,
    pub f_measure: Option<f64>,
}

impl MetricReport {
    /// Throughput is measured over the whole simulated span.
    pub fn from_log(log: &EventLog) -> Self {
        let t = totals(log);
        let c = confusion_from_log(log);
        Self {
            generated: t.generated,
            delivered: t.delivered,
            pfr: pfr_from_counts(t.delivered, t.generated),
            net_throughput: throughput_from_count(t.delivered, log.duration_secs()).unwrap_or(0.0),
            aecr: aecr(log),
            accuracy: c.as_ref().and_then(accuracy),
            f_measure: c
                .as_ref()
                .and_then(|c| f_measure(c, RecallConvention::Standard)),
        }
    }
}

/// Mean and sample standard deviation over the defined values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub count: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

pub fn summarize(values: impl IntoIterator<Item = Option<f64>>) -> Summary {
    let v: Vec<f64> = values.into_iter().flatten().collect();
    let n = v.len();
    if n == 0 {
        return Summary::default();
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let std = (n > 1)
        .then(|| (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt());
    Summary {
        count: n,
        mean: Some(mean),
        std,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cc(tp: u64, fp: u64, tn: u64, fn_: u64) -> ConfusionCounts {
        ConfusionCounts { tp, fp, tn, fn_ }
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(pfr_from_counts(40, 50), Some(0.8));
        assert_eq!(pfr_from_counts(0, 0), None);
        assert_eq!(throughput_from_count(100, 10.0).unwrap(), 10.0);
        assert_eq!(throughput_from_count(100, 5.0).unwrap(), 20.0);
        assert_eq!(throughput_from_count(0, 10.0).unwrap(), 0.0);
        assert!(throughput_from_count(1, 0.0).is_err());
        assert_eq!(aecr_from_energy(10.0, 60.0, 40.0), Some(0.1));
        assert_eq!(aecr_from_energy(0.0, 60.0, 40.0), Some(0.0));
        assert_eq!(aecr_from_energy(3.0, 0.0, 0.0), None);
    }

    #[test]
    fn confusion_examples() {
        let truth: Vec<(usize, bool)> = (0..50).map(|i| (i, i < 5)).collect();
        let all_trusted: Vec<(usize, bool)> = (0..50).map(|i| (i, false)).collect();
        let c = confusion(&all_trusted, &truth).unwrap();
        assert_eq!((c.fn_, c.tn, c.tp, c.fp), (5, 45, 0, 0));
        let c = confusion(&truth, &truth).unwrap();
        assert_eq!((c.fp, c.fn_), (0, 0));
        assert_eq!(accuracy(&c), Some(1.0));
        assert_eq!(f_measure(&c, RecallConvention::Standard), Some(1.0));
        assert_eq!(
            confusion(&truth[..10], &truth),
            Err(MetricsError::InputMismatch)
        );
        let shifted: Vec<(usize, bool)> = (1..51).map(|i| (i, false)).collect();
        assert_eq!(
            confusion(&shifted, &truth),
            Err(MetricsError::InputMismatch)
        );
    }

    #[test]
    fn accuracy_and_f_examples() {
        let c = cc(9, 1, 8, 2);
        assert_eq!(accuracy(&c), Some(17.0 / 20.0));
        let p: f64 = 0.9;
        let r: f64 = 9.0 / 11.0;
        assert!(
            (f_measure(&c, RecallConvention::Standard).unwrap() - 2.0 * p * r / (p + r)).abs()
                < 1e-15
        );
        let rp: f64 = 9.0 / 17.0;
        assert!(
            (f_measure(&c, RecallConvention::OverTpTn).unwrap() - 2.0 * p * rp / (p + rp)).abs()
                < 1e-15
        );
        assert_eq!(f_measure(&cc(0, 0, 5, 0), RecallConvention::Standard), None);
        assert_eq!(f_measure(&cc(0, 3, 5, 2), RecallConvention::Standard), None);
        assert_eq!(accuracy(&ConfusionCounts::default()), None);
    }

    #[test]
    fn summary_uses_sample_std() {
        let s = summarize([Some(1.0), Some(2.0), None, Some(3.0)]);
        assert_eq!(s.count, 3);
        assert_eq!(s.mean, Some(2.0));
        assert_eq!(s.std, Some(1.0));
        assert_eq!(summarize([None]).mean, None);
        assert_eq!(summarize([Some(4.0)]).std, None);
    }

    proptest! {
        #[test]
        fn bounded_and_swap_invariant(tp in 0u64..50, fp in 0u64..50, tn in 0u64..50, fn_ in 0u64..50) {
            let c = cc(tp, fp, tn, fn_);
            if let Some(a) = accuracy(&c) {
                prop_assert!((0.0..=1.0).contains(&a));
                prop_assert_eq!(Some(a), accuracy(&cc(tn, fn_, tp, fp)));
            }
            if let Some(f) = f_measure(&c, RecallConvention::Standard) {
                prop_assert!((0.0..=1.0).contains(&f));
                prop_assert_eq!(f == 1.0, fp == 0 && fn_ == 0);
            }
        }

        #[test]
        fn confusion_matches_enumeration(labels in prop::collection::vec((any::<bool>(), any::<bool>()), 1..40)) {
            let pred: Vec<(usize, bool)> = labels.iter().enumerate().map(|(i, l)| (i, l.0)).collect();
            let truth: Vec<(usize, bool)> = labels.iter().enumerate().map(|(i, l)| (i, l.1)).collect();
            let c = confusion(&pred, &truth).unwrap();
            let count = |p: bool, t: bool| labels.iter().filter(|l| **l == (p, t)).count() as u64;
            prop_assert_eq!(c, cc(count(true, true), count(true, false), count(false, false), count(false, true)));
            prop_assert_eq!(c.population(), labels.len() as u64);
        }
    }
}
