//! Training data for the behavioral model: ledger features of every node at
//! evenly spaced snapshots of short no-trust scenarios.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anfis::Sample;
use crate::simnet::{MaliciousKind, Role, ScenarioConfig, Simulator};
use crate::trust::{
    compute_honesty, compute_intimacy, compute_rfi, InteractionLedger, IntimacyMode, NodeId,
};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LabelSource {
    /// Fixed targets per class.
    Hard { legitimate: f64, malicious: f64 },
    /// Empirical forwarding success rate seen by all observers.
    Soft,
}

impl Default for LabelSource {
    fn default() -> Self {
        Self::Hard {
            legitimate: 0.9,
            malicious: 0.1,
        }
    }
}

/// Whose view of a node a row records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObserverChoice {
    /// The node's busiest observer.
    Primary,
    /// A seeded uniform pick among all nodes holding evidence about it, which
    /// matches how the model is queried: by any assessor, busy or not.
    #[default]
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingDatasetSpec {
    pub node_count: usize,
    /// One scenario per entry (cycled when `scenarios` is larger).
    pub malicious_fractions: Vec<f64>,
    pub malicious_kind: MaliciousKind,
    pub scenarios: usize,
    /// Snapshots per scenario; each contributes one row per node.
    pub samples_per_node: usize,
    pub sim_duration: f64,
    pub labels: LabelSource,
    pub seed: u64,
    pub intimacy_mode: IntimacyMode,
    /// Per-link loss in the generating scenarios.
    pub link_loss: f64,
    pub observer: ObserverChoice,
}

impl Default for TrainingDatasetSpec {
    fn default() -> Self {
        Self {
            node_count: 50,
            malicious_fractions: vec![0.2],
            malicious_kind: MaliciousKind::Mixed,
            scenarios: 1,
            samples_per_node: 10,
            sim_duration: 60.0,
            labels: LabelSource::default(),
            seed: 1,
            intimacy_mode: IntimacyMode::Normalized,
            link_loss: 0.0,
            observer: ObserverChoice::default(),
        }
    }
}

impl TrainingDatasetSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.samples_per_node == 0 || self.scenarios == 0 || self.malicious_fractions.is_empty()
        {
            return Err(HarnessError::Usage(
                "dataset needs samples >= 1, scenarios >= 1 and a malicious fraction".into(),
            ));
        }
        if !(self.sim_duration > 0.0) {
            return Err(HarnessError::Usage(
                "dataset sim_duration must be > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn scenario(&self, index: usize) -> ScenarioConfig {
        ScenarioConfig {
            node_count: self.node_count,
            malicious_fraction: self.malicious_fractions[index % self.malicious_fractions.len()],
            malicious_kind: self.malicious_kind,
            sim_duration: self.sim_duration,
            seed: self.seed.wrapping_add(index as u64),
            trust_enabled: false,
            intimacy_mode: self.intimacy_mode,
            link_loss: self.link_loss,
            ..ScenarioConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub scenario: usize,
    pub snapshot: usize,
    pub node: NodeId,
    pub malicious: bool,
    pub inputs: [f64; 3],
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub rows: Vec<DatasetRow>,
}

const OBSERVER_STREAM: u64 = 7;

const HEADER: &str = "scenario\tsnapshot\tnode\tmalicious\trfi\tintimacy\thonesty\ttarget";

/// Behavioral inputs of `node` as seen by `observer`. Without an observer
/// the result is the no-evidence point (0, 0, 0.5).
pub fn observed_features(
    ledger: &InteractionLedger,
    observer: Option<NodeId>,
    node: NodeId,
    mode: IntimacyMode,
) -> Result<[f64; 3], HarnessError> {
    let Some(obs) = observer else {
        return Ok([0.0, 0.0, 0.5]);
    };
    Ok([
        compute_rfi(ledger, obs, node),
        compute_intimacy(ledger, obs, node, mode).value,
        compute_honesty(ledger.counters(obs, node))?,
    ])
}

fn success_rate(ledger: &InteractionLedger, node: NodeId) -> f64 {
    let (mut s, mut f) = (0u64, 0u64);
    for i in 0..ledger.node_count() {
        let p = ledger.pair(i, node);
        s += p.successes;
        f += p.failures;
    }
    if s + f == 0 {
        0.5
    } else {
        s as f64 / (s + f) as f64
    }
}

pub fn gen_training_dataset(spec: &TrainingDatasetSpec) -> Result<Dataset, HarnessError> {
    spec.validate()?;
    let mut rows = Vec::new();
    for scenario in 0..spec.scenarios {
        let cfg = spec.scenario(scenario);
        let mut sim = Simulator::new(&cfg, None)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(OBSERVER_STREAM);
        let roles: Vec<Role> = sim.nodes().iter().map(|n| n.role).collect();
        for snapshot in 0..spec.samples_per_node {
            let t = spec.sim_duration * (snapshot + 1) as f64 / spec.samples_per_node as f64;
            sim.run_until(t)?;
            let ledger = sim.ledger();
            for (node, role) in roles.iter().enumerate() {
                let malicious = role.is_malicious();
                let target = match spec.labels {
                    LabelSource::Hard {
                        legitimate,
                        malicious: m,
                    } => {
                        if malicious {
                            m
                        } else {
                            legitimate
                        }
                    }
                    LabelSource::Soft => success_rate(ledger, node),
                };
                let observer = match spec.observer {
                    ObserverChoice::Primary => ledger.primary_observer(node),
                    ObserverChoice::Random => {
                        let all: Vec<NodeId> = ledger.observers(node).collect();
                        (!all.is_empty()).then(|| all[rng.random_range(0..all.len())])
                    }
                };
                rows.push(DatasetRow {
                    scenario,
                    snapshot,
                    node,
                    malicious,
                    inputs: observed_features(ledger, observer, node, spec.intimacy_mode)?,
                    target,
                });
            }
        }
    }
    Ok(Dataset { rows })
}

impl Dataset {
    pub fn samples(&self) -> Vec<Sample> {
        self.rows
            .iter()
            .map(|r| Sample::new(r.inputs, r.target))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from(HEADER);
        s.push('\n');
        for r in &self.rows {
            writeln!(
                s,
                "{}\t{}\t{}\t{}\t{:?}\t{:?}\t{:?}\t{:?}",
                r.scenario,
                r.snapshot,
                r.node,
                u8::from(r.malicious),
                r.inputs[0],
                r.inputs[1],
                r.inputs[2],
                r.target
            )
            .unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, HarnessError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == HEADER => {}
            _ => {
                return Err(HarnessError::Parse {
                    line: 1,
                    message: "missing dataset header".into(),
                })
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| HarnessError::Parse {
                line: i + 1,
                message: m.to_string(),
            };
            let c: Vec<&str> = line.split('\t').collect();
            if c.len() != 8 {
                return Err(err("expected 8 columns"));
            }
            let int = |k: usize| c[k].parse::<usize>().map_err(|_| err("bad integer"));
            let num = |k: usize| c[k].parse::<f64>().map_err(|_| err("bad number"));
            rows.push(DatasetRow {
                scenario: int(0)?,
                snapshot: int(1)?,
                node: int(2)?,
                malicious: int(3)? == 1,
                inputs: [num(4)?, num(5)?, num(6)?],
                target: num(7)?,
            });
        }
        Ok(Self { rows })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), HarnessError> {
        std::fs::write(path.as_ref(), self.to_text())
            .map_err(|e| HarnessError::io(path.as_ref(), e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| HarnessError::io(path.as_ref(), e))?;
        Self::from_text(&text)
    }
}
