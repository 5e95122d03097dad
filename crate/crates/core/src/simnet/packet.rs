use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use crate::trust::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PacketKind {
    Rreq,
    Rrep,
    Data,
    /// Reserved; recommendations are read from guarantors' cached opinions.
    TrustRec,
}

impl PacketKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Rreq => "RREQ",
            Self::Rrep => "RREP",
            Self::Data => "DATA",
            Self::TrustRec => "TRUST_REC",
        }
    }
}

impl fmt::Display for PacketKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PacketKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "RREQ" => Ok(Self::Rreq),
            "RREP" => Ok(Self::Rrep),
            "DATA" => Ok(Self::Data),
            "TRUST_REC" => Ok(Self::TrustRec),
            _ => Err(format!("unknown packet kind {s:?}")),
        }
    }
}

pub const RREQ_SIZE: u32 = 24;
pub const RREP_SIZE: u32 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub uid: u64,
    pub kind: PacketKind,
    /// Originator: data source, or the node that started the discovery.
    pub src: NodeId,
    pub dst: NodeId,
    pub flow: Option<usize>,
    /// Data sequence number within its flow, or discovery id for control packets.
    pub seq: u64,
    pub trace: Vec<NodeId>,
    pub size: u32,
    /// Microseconds.
    pub created_at: u64,
}

impl Packet {
    pub fn trace_string(&self) -> String {
        let s: Vec<String> = self.trace.iter().map(|n| n.to_string()).collect();
        s.join(">")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    /// `node` transmits `packet`; `to = None` broadcasts to all neighbors.
    Send {
        node: NodeId,
        to: Option<NodeId>,
        packet: Packet,
    },
    Receive {
        node: NodeId,
        from: NodeId,
        packet: Packet,
    },
    Timer(Timer),
    MobilityTick,
    TrustUpdate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Timer {
    Generate {
        flow: usize,
    },
    SendReply {
        node: NodeId,
        origin: NodeId,
        id: u64,
    },
    DiscoveryTimeout {
        node: NodeId,
        dst: NodeId,
        id: u64,
    },
    DataWatch {
        uid: u64,
        stamp: u64,
    },
    RreqWatch {
        watcher: NodeId,
        watched: NodeId,
        origin: NodeId,
        id: u64,
        dst: NodeId,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEvent {
    /// Microseconds.
    pub time: u64,
    pub seq: u64,
    pub kind: EventKind,
}

impl Eq for SimEvent {}

impl Ord for SimEvent {
    // Reversed so the max-heap pops the earliest (time, seq) first.
    fn cmp(&self, other: &Self) -> Ordering {
        (other.time, other.seq).cmp(&(self.time, self.seq))
    }
}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Time-ordered queue; ties pop in insertion order.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<SimEvent>,
    next_seq: u64,
}

impl EventQueue {
    pub fn push(&mut self, time: u64, kind: EventKind) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(SimEvent { time, seq, kind });
    }

    pub fn pop(&mut self) -> Option<SimEvent> {
        self.heap.pop()
    }

    pub fn peek_time(&self) -> Option<u64> {
        self.heap.peek().map(|e| e.time)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn drain(&mut self) -> impl Iterator<Item = SimEvent> + '_ {
        self.heap.drain()
    }
}
