use super::TrustError;

pub type NodeId = usize;

/// Result of one observed interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Success,
    Failure,
}

/// Beta-distribution evidence about a node: successes + 1 and failures + 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaCounters {
    pub a: f64,
    pub b: f64,
}

impl Default for BetaCounters {
    fn default() -> Self {
        Self { a: 1.0, b: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairRecord {
    /// Interactions within the current observation window.
    pub count: u64,
    /// Cumulative interaction time in seconds.
    pub duration: f64,
    pub successes: u64,
    pub failures: u64,
    /// Most recent reading of the assessee seen by the assessor, with its time.
    pub last_reading: Option<(f64, f64)>,
}

impl PairRecord {
    pub fn counters(&self) -> BetaCounters {
        BetaCounters {
            a: self.successes as f64 + 1.0,
            b: self.failures as f64 + 1.0,
        }
    }
}

/// Dense per-ordered-pair interaction evidence for a fixed node population.
///
/// Counts are kept per observation window (tumbling, when a window length is
/// set); durations and success/failure counters accumulate for the whole
/// lifetime of the ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionLedger {
    nodes: usize,
    pairs: Vec<PairRecord>,
    /// N_j: windowed interaction count of each assessee over all partners.
    totals: Vec<u64>,
    durations: Vec<f64>,
    window_start: f64,
    window_len: Option<f64>,
}

impl InteractionLedger {
    pub fn new(nodes: usize) -> Self {
        Self {
            nodes,
            pairs: vec![PairRecord::default(); nodes * nodes],
            totals: vec![0; nodes],
            durations: vec![0.0; nodes],
            window_start: 0.0,
            window_len: None,
        }
    }

    pub fn with_window(nodes: usize, window_len: f64) -> Self {
        let mut l = Self::new(nodes);
        l.window_len = Some(window_len).filter(|w| *w > 0.0);
        l
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn window(&self) -> (f64, Option<f64>) {
        (self.window_start, self.window_len)
    }

    fn idx(&self, assessor: NodeId, assessee: NodeId) -> usize {
        assessor * self.nodes + assessee
    }

    pub fn pair(&self, assessor: NodeId, assessee: NodeId) -> &PairRecord {
        &self.pairs[self.idx(assessor, assessee)]
    }

    /// Rolls the observation window forward to cover `now`.
    pub fn advance(&mut self, now: f64) {
        let Some(len) = self.window_len else { return };
        if now < self.window_start + len {
            return;
        }
        let skipped = ((now - self.window_start) / len).floor();
        self.window_start += skipped * len;
        for p in &mut self.pairs {
            p.count = 0;
        }
        self.totals.iter_mut().for_each(|t| *t = 0);
    }

    /// Records a completed interaction in which `assessor` observed `assessee`.
    pub fn record(
        &mut self,
        assessor: NodeId,
        assessee: NodeId,
        outcome: Outcome,
        duration: f64,
        now: f64,
    ) {
        self.advance(now);
        let idx = self.idx(assessor, assessee);
        let p = &mut self.pairs[idx];
        p.count += 1;
        p.duration += duration.max(0.0);
        match outcome {
            Outcome::Success => p.successes += 1,
            Outcome::Failure => p.failures += 1,
        }
        self.totals[assessee] += 1;
        self.durations[assessee] += duration.max(0.0);
    }

    pub fn record_reading(&mut self, assessor: NodeId, assessee: NodeId, reading: f64, now: f64) {
        let idx = self.idx(assessor, assessee);
        self.pairs[idx].last_reading = Some((now, reading));
    }

    /// n_ij: windowed interactions between `assessor` and `assessee`.
    pub fn count(&self, assessor: NodeId, assessee: NodeId) -> u64 {
        self.pair(assessor, assessee).count
    }

    /// N_j: windowed interactions of `assessee` with everyone.
    pub fn total(&self, assessee: NodeId) -> u64 {
        self.totals[assessee]
    }

    pub fn duration(&self, assessor: NodeId, assessee: NodeId) -> f64 {
        self.pair(assessor, assessee).duration
    }

    /// Cumulative interaction time of `assessee` with all partners except `assessor`.
    pub fn duration_with_others(&self, assessor: NodeId, assessee: NodeId) -> f64 {
        (self.durations[assessee] - self.duration(assessor, assessee)).max(0.0)
    }

    pub fn counters(&self, assessor: NodeId, assessee: NodeId) -> BetaCounters {
        self.pair(assessor, assessee).counters()
    }

    /// Assessors holding any evidence about `assessee`.
    pub fn observers(&self, assessee: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes).filter(move |&i| {
            let p = self.pair(i, assessee);
            p.successes + p.failures > 0 || p.last_reading.is_some()
        })
    }

    /// The assessor with the most windowed interactions with `assessee`
    /// (lowest id on ties), if any.
    pub fn primary_observer(&self, assessee: NodeId) -> Option<NodeId> {
        (0..self.nodes)
            .filter(|&i| i != assessee && self.count(i, assessee) > 0)
            .max_by(|&a, &b| {
                self.count(a, assessee)
                    .cmp(&self.count(b, assessee))
                    .then(b.cmp(&a))
            })
    }
}

/// Relative frequency of interaction: `n_ij / N_j`, or 0 with no interactions.
pub fn compute_rfi(ledger: &InteractionLedger, assessor: NodeId, assessee: NodeId) -> f64 {
    rfi_from_counts(ledger.count(assessor, assessee), ledger.total(assessee))
}

pub fn rfi_from_counts(n: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        n as f64 / total as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntimacyMode {
    /// `t_ij / (t_ij - t_kj)`, clamped to `[0, 1]`.
    AsWritten,
    /// `t_ij / (t_ij + t_kj)`.
    #[default]
    Normalized,
}

/// Denominator magnitude below which the literal form is treated as singular.
pub const INTIMACY_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intimacy {
    pub value: f64,
    /// Set when the literal form hit its singular denominator.
    pub degenerate: bool,
}

pub fn intimacy_from_durations(own: f64, others: f64, mode: IntimacyMode) -> Intimacy {
    match mode {
        IntimacyMode::Normalized => {
            let sum = own + others;
            let value = if sum > 0.0 { own / sum } else { 0.0 };
            Intimacy {
                value,
                degenerate: false,
            }
        }
        IntimacyMode::AsWritten => {
            let denom = own - others;
            if denom.abs() < INTIMACY_GUARD {
                Intimacy {
                    value: 1.0,
                    degenerate: true,
                }
            } else {
                Intimacy {
                    value: (own / denom).clamp(0.0, 1.0),
                    degenerate: false,
                }
            }
        }
    }
}

pub fn compute_intimacy(
    ledger: &InteractionLedger,
    assessor: NodeId,
    assessee: NodeId,
    mode: IntimacyMode,
) -> Intimacy {
    intimacy_from_durations(
        ledger.duration(assessor, assessee),
        ledger.duration_with_others(assessor, assessee),
        mode,
    )
}

/// Mean of Beta(a, b).
pub fn compute_honesty(counters: BetaCounters) -> Result<f64, TrustError> {
    let BetaCounters { a, b } = counters;
    if !(a >= 1.0 && b >= 1.0) {
        return Err(TrustError::LedgerCorrupt { a, b });
    }
    Ok(a / (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ledger_with(counts: &[(NodeId, NodeId, u64)]) -> InteractionLedger {
        let mut l = InteractionLedger::new(6);
        for &(i, j, n) in counts {
            for _ in 0..n {
                l.record(i, j, Outcome::Success, 0.0, 0.0);
            }
        }
        l
    }

    #[test]
    fn rfi_examples() {
        let l = ledger_with(&[(0, 5, 5), (1, 5, 15)]);
        assert_eq!(compute_rfi(&l, 0, 5), 0.25);
        let l = ledger_with(&[(2, 3, 7)]);
        assert_eq!(compute_rfi(&l, 2, 3), 1.0);
        let l = InteractionLedger::new(3);
        assert_eq!(compute_rfi(&l, 0, 1), 0.0);
    }

    #[test]
    fn intimacy_examples() {
        let n = intimacy_from_durations(10.0, 5.0, IntimacyMode::Normalized);
        assert!((n.value - 10.0 / 15.0).abs() < 1e-15);
        let w = intimacy_from_durations(10.0, 5.0, IntimacyMode::AsWritten);
        assert_eq!(w.value, 1.0);
        assert!(!w.degenerate);
        assert_eq!(
            intimacy_from_durations(0.0, 0.0, IntimacyMode::Normalized).value,
            0.0
        );
        // Literal form with a negative ratio clamps to zero.
        assert_eq!(
            intimacy_from_durations(2.0, 5.0, IntimacyMode::AsWritten).value,
            0.0
        );
    }

    #[test]
    fn intimacy_literal_guard() {
        let i = intimacy_from_durations(4.0, 4.0, IntimacyMode::AsWritten);
        assert_eq!(
            i,
            Intimacy {
                value: 1.0,
                degenerate: true
            }
        );
        let i = intimacy_from_durations(4.0, 4.0, IntimacyMode::Normalized);
        assert_eq!(
            i,
            Intimacy {
                value: 0.5,
                degenerate: false
            }
        );
    }

    #[test]
    fn intimacy_from_ledger() {
        let mut l = InteractionLedger::new(3);
        l.record(0, 2, Outcome::Success, 10.0, 0.0);
        l.record(1, 2, Outcome::Success, 5.0, 0.0);
        let v = compute_intimacy(&l, 0, 2, IntimacyMode::Normalized).value;
        assert!((v - 10.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn honesty_examples() {
        assert_eq!(
            compute_honesty(BetaCounters { a: 3.0, b: 1.0 }).unwrap(),
            0.75
        );
        assert_eq!(compute_honesty(BetaCounters::default()).unwrap(), 0.5);
        let mut l = InteractionLedger::new(2);
        for _ in 0..10 {
            l.record(0, 1, Outcome::Success, 0.1, 0.0);
        }
        assert_eq!(l.counters(0, 1), BetaCounters { a: 11.0, b: 1.0 });
        assert!((compute_honesty(l.counters(0, 1)).unwrap() - 11.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn honesty_rejects_corrupt_counters() {
        assert!(matches!(
            compute_honesty(BetaCounters { a: 0.5, b: 1.0 }),
            Err(TrustError::LedgerCorrupt { .. })
        ));
        assert!(compute_honesty(BetaCounters {
            a: 1.0,
            b: f64::NAN
        })
        .is_err());
    }

    #[test]
    fn window_resets_counts_but_keeps_evidence() {
        let mut l = InteractionLedger::with_window(2, 10.0);
        l.record(0, 1, Outcome::Success, 1.0, 1.0);
        l.record(0, 1, Outcome::Failure, 1.0, 2.0);
        assert_eq!(l.count(0, 1), 2);
        l.record(0, 1, Outcome::Success, 1.0, 25.0);
        assert_eq!(l.count(0, 1), 1);
        assert_eq!(l.total(1), 1);
        assert_eq!(l.window().0, 20.0);
        assert_eq!(l.counters(0, 1), BetaCounters { a: 3.0, b: 2.0 });
        assert_eq!(l.duration(0, 1), 3.0);
    }

    #[test]
    fn primary_observer_prefers_most_interactions() {
        let l = ledger_with(&[(0, 4, 2), (1, 4, 5), (2, 4, 5)]);
        assert_eq!(l.primary_observer(4), Some(1));
        assert_eq!(l.primary_observer(3), None);
    }

    proptest! {
        #[test]
        fn rfi_sums_to_one(counts in prop::collection::vec(0u64..20, 5)) {
            let mut l = InteractionLedger::new(6);
            for (i, &n) in counts.iter().enumerate() {
                for _ in 0..n {
                    l.record(i, 5, Outcome::Success, 0.0, 0.0);
                }
            }
            let sum: f64 = (0..5).map(|i| compute_rfi(&l, i, 5)).sum();
            for i in 0..5 {
                let r = compute_rfi(&l, i, 5);
                prop_assert!((0.0..=1.0).contains(&r));
            }
            if counts.iter().sum::<u64>() > 0 {
                prop_assert!((sum - 1.0).abs() < 1e-12);
            } else {
                prop_assert_eq!(sum, 0.0);
            }
        }

        #[test]
        fn honesty_moves_with_evidence(s in 0u64..50, f in 0u64..50) {
            let base = BetaCounters { a: s as f64 + 1.0, b: f as f64 + 1.0 };
            let h = compute_honesty(base).unwrap();
            let up = compute_honesty(BetaCounters { a: base.a + 1.0, ..base }).unwrap();
            let down = compute_honesty(BetaCounters { b: base.b + 1.0, ..base }).unwrap();
            prop_assert!(up > h);
            prop_assert!(down < h);
            prop_assert!(h > 0.0 && h < 1.0);
        }
    }
}
