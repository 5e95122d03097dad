//! The event log: everything needed to recompute metrics offline.
//!
//! Text form is one record per line with nine tab-separated columns:
//! `time event node peer packet flow outcome energy detail`. Absent values
//! are `-`. Times are seconds with microsecond resolution.

use std::fmt::Write as _;

use crate::trust::{Classification, NodeId, Outcome};

use super::config::Role;
use super::packet::PacketKind;
use super::SimError;

pub const LOG_HEADER: &str = "time\tevent\tnode\tpeer\tpacket\tflow\toutcome\tenergy\tdetail";

#[derive(Debug, Clone, PartialEq)]
pub enum LogEntry {
    Role {
        node: NodeId,
        role: Role,
    },
    Flow {
        flow: usize,
        src: NodeId,
        dst: NodeId,
    },
    Warn {
        time: u64,
        message: String,
    },
    Gen {
        time: u64,
        node: NodeId,
        dst: NodeId,
        uid: u64,
        flow: usize,
    },
    /// `peer = None` is a broadcast.
    Tx {
        time: u64,
        node: NodeId,
        peer: Option<NodeId>,
        kind: PacketKind,
        uid: u64,
        energy: f64,
    },
    Rx {
        time: u64,
        node: NodeId,
        peer: NodeId,
        kind: PacketKind,
        uid: u64,
        energy: f64,
    },
    Deliver {
        time: u64,
        node: NodeId,
        uid: u64,
        flow: usize,
        trace: Vec<NodeId>,
    },
    Drop {
        time: u64,
        node: NodeId,
        kind: PacketKind,
        uid: u64,
        flow: Option<usize>,
        reason: String,
        trace: Vec<NodeId>,
    },
    NoRoute {
        time: u64,
        node: NodeId,
        dst: NodeId,
    },
    Eval {
        time: u64,
        assessor: NodeId,
        assessee: NodeId,
        outcome: Outcome,
        energy: f64,
        total: f64,
        class: Classification,
        applied: bool,
    },
    /// Data packets still alive at the end of the run, with their holder.
    Inflight {
        time: u64,
        node: NodeId,
        uid: u64,
        flow: usize,
    },
    /// Final classification of each node (trust-enabled runs).
    Class {
        time: u64,
        node: NodeId,
        class: Classification,
    },
}

pub fn fmt_time(us: u64) -> String {
    format!("{}.{:06}", us / 1_000_000, us % 1_000_000)
}

pub fn parse_time(s: &str) -> Result<u64, String> {
    let (a, b) = s.split_once('.').ok_or_else(|| format!("bad time {s:?}"))?;
    if b.len() != 6 {
        return Err(format!("bad time {s:?}"));
    }
    let secs: u64 = a.parse().map_err(|_| format!("bad time {s:?}"))?;
    let micros: u64 = b.parse().map_err(|_| format!("bad time {s:?}"))?;
    Ok(secs * 1_000_000 + micros)
}

fn trace_str(t: &[NodeId]) -> String {
    if t.is_empty() {
        return "-".into();
    }
    t.iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(">")
}

fn parse_trace(s: &str) -> Result<Vec<NodeId>, String> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.split('>')
        .map(|x| x.parse().map_err(|_| format!("bad trace {s:?}")))
        .collect()
}

fn outcome_str(o: Outcome) -> &'static str {
    match o {
        Outcome::Success => "success",
        Outcome::Failure => "failure",
    }
}

impl LogEntry {
    pub fn time(&self) -> u64 {
        match self {
            Self::Role { .. } | Self::Flow { .. } => 0,
            Self::Warn { time, .. }
            | Self::Gen { time, .. }
            | Self::Tx { time, .. }
            | Self::Rx { time, .. }
            | Self::Deliver { time, .. }
            | Self::Drop { time, .. }
            | Self::NoRoute { time, .. }
            | Self::Eval { time, .. }
            | Self::Inflight { time, .. }
            | Self::Class { time, .. } => *time,
        }
    }

    pub fn to_line(&self) -> String {
        let d = "-";
        let cols: [String; 9] = match self {
            Self::Role { node, role } => [
                fmt_time(0),
                "role".into(),
                node.to_string(),
                d.into(),
                d.into(),
                d.into(),
                role.to_string(),
                d.into(),
                d.into(),
            ],
            Self::Flow { flow, src, dst } => [
                fmt_time(0),
                "flow".into(),
                src.to_string(),
                dst.to_string(),
                d.into(),
                flow.to_string(),
                d.into(),
                d.into(),
                d.into(),
            ],
            Self::Warn { time, message } => [
                fmt_time(*time),
                "warn".into(),
                d.into(),
                d.into(),
                d.into(),
                d.into(),
                d.into(),
                d.into(),
                message.replace(['\t', '\n'], " "),
            ],
            Self::Gen {
                time,
                node,
                dst,
                uid,
                flow,
            } => [
                fmt_time(*time),
                "gen".into(),
                node.to_string(),
                dst.to_string(),
                uid.to_string(),
                flow.to_string(),
                d.into(),
                d.into(),
                d.into(),
            ],
            Self::Tx {
                time,
                node,
                peer,
                kind,
                uid,
                energy,
            } => [
                fmt_time(*time),
                "tx".into(),
                node.to_string(),
                peer.map_or("*".into(), |p| p.to_string()),
                uid.to_string(),
                d.into(),
                kind.to_string(),
                format!("{energy:?}"),
                d.into(),
            ],
            Self::Rx {
                time,
                node,
                peer,
                kind,
                uid,
                energy,
            } => [
                fmt_time(*time),
                "rx".into(),
                node.to_string(),
                peer.to_string(),
                uid.to_string(),
                d.into(),
                kind.to_string(),
                format!("{energy:?}"),
                d.into(),
            ],
            Self::Deliver {
                time,
                node,
                uid,
                flow,
                trace,
            } => [
                fmt_time(*time),
                "deliver".into(),
                node.to_string(),
                d.into(),
                uid.to_string(),
                flow.to_string(),
                d.into(),
                d.into(),
                trace_str(trace),
            ],
            Self::Drop {
                time,
                node,
                kind,
                uid,
                flow,
                reason,
                trace,
            } => [
                fmt_time(*time),
                "drop".into(),
                node.to_string(),
                d.into(),
                uid.to_string(),
                flow.map_or(d.into(), |f| f.to_string()),
                format!("{kind}:{reason}"),
                d.into(),
                trace_str(trace),
            ],
            Self::NoRoute { time, node, dst } => [
                fmt_time(*time),
                "noroute".into(),
                node.to_string(),
                dst.to_string(),
                d.into(),
                d.into(),
                d.into(),
                d.into(),
                d.into(),
            ],
            Self::Eval {
                time,
                assessor,
                assessee,
                outcome,
                energy,
                total,
                class,
                applied,
            } => [
                fmt_time(*time),
                "eval".into(),
                assessor.to_string(),
                assessee.to_string(),
                d.into(),
                d.into(),
                outcome_str(*outcome).into(),
                format!("{energy:?}"),
                format!("{total:?};{class};{}", u8::from(*applied)),
            ],
            Self::Inflight {
                time,
                node,
                uid,
                flow,
            } => [
                fmt_time(*time),
                "inflight".into(),
                node.to_string(),
                d.into(),
                uid.to_string(),
                flow.to_string(),
                d.into(),
                d.into(),
                d.into(),
            ],
            Self::Class { time, node, class } => [
                fmt_time(*time),
                "class".into(),
                node.to_string(),
                d.into(),
                d.into(),
                d.into(),
                class.to_string(),
                d.into(),
                d.into(),
            ],
        };
        cols.join("\t")
    }

    pub fn parse_line(line: &str) -> Result<Self, String> {
        let c: Vec<&str> = line.split('\t').collect();
        if c.len() != 9 {
            return Err(format!("expected 9 columns, got {}", c.len()));
        }
        let time = parse_time(c[0])?;
        let id = |i: usize| {
            c[i].parse::<usize>()
                .map_err(|_| format!("bad id {:?}", c[i]))
        };
        let uid = || {
            c[4].parse::<u64>()
                .map_err(|_| format!("bad packet id {:?}", c[4]))
        };
        let energy = || {
            c[7].parse::<f64>()
                .map_err(|_| format!("bad energy {:?}", c[7]))
        };
        Ok(match c[1] {
            "role" => Self::Role {
                node: id(2)?,
                role: c[6].parse()?,
            },
            "flow" => Self::Flow {
                flow: id(5)?,
                src: id(2)?,
                dst: id(3)?,
            },
            "warn" => Self::Warn {
                time,
                message: c[8].to_string(),
            },
            "gen" => Self::Gen {
                time,
                node: id(2)?,
                dst: id(3)?,
                uid: uid()?,
                flow: id(5)?,
            },
            "tx" => Self::Tx {
                time,
                node: id(2)?,
                peer: if c[3] == "*" { None } else { Some(id(3)?) },
                kind: c[6].parse()?,
                uid: uid()?,
                energy: energy()?,
            },
            "rx" => Self::Rx {
                time,
                node: id(2)?,
                peer: id(3)?,
                kind: c[6].parse()?,
                uid: uid()?,
                energy: energy()?,
            },
            "deliver" => Self::Deliver {
                time,
                node: id(2)?,
                uid: uid()?,
                flow: id(5)?,
                trace: parse_trace(c[8])?,
            },
            "drop" => {
                let (kind, reason) = c[6].split_once(':').ok_or("bad drop outcome")?;
                Self::Drop {
                    time,
                    node: id(2)?,
                    kind: kind.parse()?,
                    uid: uid()?,
                    flow: if c[5] == "-" { None } else { Some(id(5)?) },
                    reason: reason.to_string(),
                    trace: parse_trace(c[8])?,
                }
            }
            "noroute" => Self::NoRoute {
                time,
                node: id(2)?,
                dst: id(3)?,
            },
            "eval" => {
                let parts: Vec<&str> = c[8].split(';').collect();
                if parts.len() != 3 {
                    return Err(format!("bad eval detail {:?}", c[8]));
                }
                Self::Eval {
                    time,
                    assessor: id(2)?,
                    assessee: id(3)?,
                    outcome: match c[6] {
                        "success" => Outcome::Success,
                        "failure" => Outcome::Failure,
                        o => return Err(format!("bad outcome {o:?}")),
                    },
                    energy: energy()?,
                    total: parts[0]
                        .parse()
                        .map_err(|_| format!("bad total {:?}", parts[0]))?,
                    class: parts[1].parse()?,
                    applied: parts[2] == "1",
                }
            }
            "inflight" => Self::Inflight {
                time,
                node: id(2)?,
                uid: uid()?,
                flow: id(5)?,
            },
            "class" => Self::Class {
                time,
                node: id(2)?,
                class: c[6].parse()?,
            },
            other => return Err(format!("unknown event {other:?}")),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    pub node_count: usize,
    /// Simulated span in microseconds.
    pub duration: u64,
    pub entries: Vec<LogEntry>,
}

impl EventLog {
    pub fn new(node_count: usize, duration: u64) -> Self {
        Self {
            node_count,
            duration,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, e: LogEntry) {
        self.entries.push(e);
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn duration_secs(&self) -> f64 {
        self.duration as f64 / 1e6
    }

    pub fn roles(&self) -> Vec<Role> {
        let mut roles = vec![Role::Legitimate; self.node_count];
        for e in &self.entries {
            if let LogEntry::Role { node, role } = e {
                roles[*node] = *role;
            }
        }
        roles
    }

    /// Final classifications, if the run evaluated trust.
    pub fn final_classes(&self) -> Option<Vec<Classification>> {
        let mut out = vec![None; self.node_count];
        for e in &self.entries {
            if let LogEntry::Class { node, class, .. } = e {
                out[*node] = Some(*class);
            }
        }
        out.into_iter().collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.entries.len() * 48);
        writeln!(
            s,
            "# nodes={} duration={}",
            self.node_count,
            fmt_time(self.duration)
        )
        .unwrap();
        s.push_str(LOG_HEADER);
        s.push('\n');
        for e in &self.entries {
            s.push_str(&e.to_line());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, SimError> {
        let mut lines = text.lines().enumerate();
        let err = |line: usize, message: String| SimError::LogParse {
            line: line + 1,
            message,
        };
        let (_, first) = lines.next().ok_or_else(|| err(0, "empty log".into()))?;
        let meta = first
            .strip_prefix("# ")
            .ok_or_else(|| err(0, "missing metadata line".into()))?;
        let mut node_count = None;
        let mut duration = None;
        for kv in meta.split(' ') {
            match kv.split_once('=') {
                Some(("nodes", v)) => node_count = v.parse().ok(),
                Some(("duration", v)) => duration = parse_time(v).ok(),
                _ => return Err(err(0, format!("bad metadata {kv:?}"))),
            }
        }
        let (Some(node_count), Some(duration)) = (node_count, duration) else {
            return Err(err(0, "incomplete metadata".into()));
        };
        match lines.next() {
            Some((_, h)) if h == LOG_HEADER => {}
            _ => return Err(err(1, "missing header".into())),
        }
        let mut log = EventLog::new(node_count, duration);
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            log.push(LogEntry::parse_line(line).map_err(|m| err(i, m))?);
        }
        Ok(log)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_format() {
        assert_eq!(fmt_time(12_000_345), "12.000345");
        assert_eq!(parse_time("12.000345").unwrap(), 12_000_345);
        assert!(parse_time("12.5").is_err());
    }

    #[test]
    fn every_entry_round_trips() {
        let entries = vec![
            LogEntry::Role {
                node: 3,
                role: Role::Hide,
            },
            LogEntry::Flow {
                flow: 1,
                src: 0,
                dst: 4,
            },
            LogEntry::Warn {
                time: 0,
                message: "graph\tdisconnected".into(),
            },
            LogEntry::Gen {
                time: 10,
                node: 0,
                dst: 4,
                uid: 7,
                flow: 1,
            },
            LogEntry::Tx {
                time: 11,
                node: 0,
                peer: None,
                kind: PacketKind::Rreq,
                uid: 8,
                energy: 0.09375,
            },
            LogEntry::Tx {
                time: 12,
                node: 0,
                peer: Some(2),
                kind: PacketKind::Data,
                uid: 7,
                energy: 2.0,
            },
            LogEntry::Rx {
                time: 13,
                node: 2,
                peer: 0,
                kind: PacketKind::Data,
                uid: 7,
                energy: 1.0,
            },
            LogEntry::Deliver {
                time: 14,
                node: 4,
                uid: 7,
                flow: 1,
                trace: vec![0, 2, 4],
            },
            LogEntry::Drop {
                time: 15,
                node: 2,
                kind: PacketKind::Data,
                uid: 9,
                flow: Some(1),
                reason: "malicious".into(),
                trace: vec![0, 2],
            },
            LogEntry::Drop {
                time: 15,
                node: 2,
                kind: PacketKind::Rrep,
                uid: 10,
                flow: None,
                reason: "break".into(),
                trace: vec![],
            },
            LogEntry::NoRoute {
                time: 16,
                node: 0,
                dst: 4,
            },
            LogEntry::Eval {
                time: 17,
                assessor: 0,
                assessee: 2,
                outcome: Outcome::Failure,
                energy: 0.5,
                total: 0.1 + 0.2,
                class: Classification::Untrusted,
                applied: true,
            },
            LogEntry::Inflight {
                time: 20,
                node: 2,
                uid: 11,
                flow: 1,
            },
            LogEntry::Class {
                time: 20,
                node: 2,
                class: Classification::Trusted,
            },
        ];
        let log = EventLog {
            node_count: 5,
            duration: 20,
            entries,
        };
        let back = EventLog::from_text(&log.to_text()).unwrap();
        let mut expected = log.clone();
        expected.entries[2] = LogEntry::Warn {
            time: 0,
            message: "graph disconnected".into(),
        };
        assert_eq!(back, expected);
        assert_eq!(back.to_text(), expected.to_text());
    }

    #[test]
    fn malformed_logs_rejected() {
        assert!(EventLog::from_text("").is_err());
        assert!(EventLog::from_text("# nodes=2 duration=1.000000\nwrong\n").is_err());
        let bad = format!(
            "# nodes=2 duration=1.000000\n{LOG_HEADER}\n0.000001\tteleport\t-\t-\t-\t-\t-\t-\t-\n"
        );
        let e = EventLog::from_text(&bad).unwrap_err();
        assert!(e.to_string().contains("line 3"));
    }
}
