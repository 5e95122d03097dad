//! Seeded discrete-event simulator of a multihop network running AODV-lite
//! with trust-aware relay filtering and hide/drop adversaries.

pub mod config;
pub mod log;
pub mod packet;
mod sim;
pub mod topology;

pub use config::{MaliciousKind, Role, ScenarioConfig};
pub use log::{EventLog, LogEntry};
pub use packet::{EventKind, EventQueue, Packet, PacketKind, SimEvent, Timer};
pub use sim::{micros, run, run_full, RunOutput, Simulator};
pub use topology::{build_topology, mobility_tick, route_discovery, Energy, NodeState, RouteEntry};

use thiserror::Error;

use crate::trust::{NodeId, TrustError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error("no route from {src} to {dst}")]
    NoRoute { src: NodeId, dst: NodeId },
    #[error("event log line {line}: {message}")]
    LogParse { line: usize, message: String },
    #[error(transparent)]
    Trust(#[from] TrustError),
}
