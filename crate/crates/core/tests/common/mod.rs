#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use neurotrust::simnet::{EventLog, LogEntry, PacketKind, Role, ScenarioConfig};

/// Static, trust-off scenario on explicit positions, roles and flows.
pub fn fixture(
    positions: &[(f64, f64)],
    roles: &[Role],
    flows: &[(usize, usize)],
    duration: f64,
) -> ScenarioConfig {
    ScenarioConfig {
        node_count: positions.len(),
        positions: Some(positions.to_vec()),
        roles: Some(roles.to_vec()),
        flows: Some(flows.to_vec()),
        speed: 0.0,
        sim_duration: duration,
        trust_enabled: false,
        ..ScenarioConfig::default()
    }
}

#[derive(Debug, Default)]
pub struct DataFate {
    pub generated: BTreeMap<u64, usize>,
    pub delivered: BTreeMap<u64, Vec<usize>>,
    pub dropped: BTreeMap<u64, String>,
    pub inflight: BTreeSet<u64>,
}

pub fn data_fate(log: &EventLog) -> DataFate {
    let mut f = DataFate::default();
    for e in &log.entries {
        match e {
            LogEntry::Gen { uid, flow, .. } => {
                f.generated.insert(*uid, *flow);
            }
            LogEntry::Deliver { uid, trace, .. } => {
                assert!(
                    f.delivered.insert(*uid, trace.clone()).is_none(),
                    "uid {uid} delivered twice"
                );
            }
            LogEntry::Drop {
                uid,
                kind: PacketKind::Data,
                reason,
                ..
            } => {
                assert!(
                    f.dropped.insert(*uid, reason.clone()).is_none(),
                    "uid {uid} dropped twice"
                );
            }
            LogEntry::Inflight { uid, .. } => {
                assert!(f.inflight.insert(*uid), "uid {uid} in flight twice");
            }
            _ => {}
        }
    }
    f
}

/// Every generated DATA packet ends in exactly one of delivered, dropped or
/// in flight, and nothing else appears. Checked per flow.
pub fn assert_conservation(log: &EventLog) {
    let f = data_fate(log);
    let mut per_flow: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (uid, flow) in &f.generated {
        let fates = usize::from(f.delivered.contains_key(uid))
            + usize::from(f.dropped.contains_key(uid))
            + usize::from(f.inflight.contains(uid));
        assert_eq!(fates, 1, "uid {uid} has {fates} fates");
        let e = per_flow.entry(*flow).or_default();
        e.0 += 1;
        e.1 += fates;
    }
    for uid in f
        .delivered
        .keys()
        .chain(f.dropped.keys())
        .chain(f.inflight.iter())
    {
        assert!(
            f.generated.contains_key(uid),
            "uid {uid} was never generated"
        );
    }
    for (flow, (sent, accounted)) in per_flow {
        assert_eq!(sent, accounted, "flow {flow}");
    }
}

/// Log times never go backwards, and every reception follows a matching
/// transmission by the sender no later than the reception.
pub fn assert_causality(log: &EventLog) {
    let mut last = 0;
    let mut sent: BTreeMap<(usize, u64), u64> = BTreeMap::new();
    for e in &log.entries {
        let t = e.time();
        assert!(t >= last, "time went backwards at {e:?}");
        last = t;
        match e {
            LogEntry::Tx {
                node, uid, time, ..
            } => {
                sent.entry((*node, *uid)).or_insert(*time);
            }
            LogEntry::Rx {
                peer, uid, time, ..
            } => {
                let s = sent
                    .get(&(*peer, *uid))
                    .unwrap_or_else(|| panic!("rx without tx: {e:?}"));
                assert!(time >= s, "received before sent: {e:?}");
            }
            _ => {}
        }
    }
}

/// No hide node relays a delivered or dropped DATA packet.
pub fn assert_hide_semantics(log: &EventLog) {
    let roles = log.roles();
    for e in &log.entries {
        // Relays: everything after the source, except the destination.
        let relays = match e {
            LogEntry::Deliver { trace, .. } if trace.len() > 2 => &trace[1..trace.len() - 1],
            LogEntry::Drop {
                kind: PacketKind::Data,
                trace,
                ..
            } if trace.len() > 1 => &trace[1..],
            _ => continue,
        };
        for &n in relays {
            assert_ne!(roles[n], Role::Hide, "hide node {n} relayed: {e:?}");
        }
    }
}
