//! Trust mathematics: behavioral properties, behavioral and data trust
//! aggregation, total trust and classification.

mod aggregate;
pub mod audit;
mod engine;
mod ledger;
mod state;

pub use aggregate::{
    behavioral_inputs, behavioral_trust, combine, data_trust, deviation_trust, direct_data_trust,
    indirect_data_trust, Aggregate, Aggregation, BehavioralTrust, DataHistory, DataRecommendation,
    Recommendation, Staleness,
};
pub use audit::{AuditLog, AuditRecord};
pub use engine::{TrustEngine, TrustParams};
pub use ledger::{
    compute_honesty, compute_intimacy, compute_rfi, intimacy_from_durations, rfi_from_counts,
    BetaCounters, InteractionLedger, Intimacy, IntimacyMode, NodeId, Outcome, PairRecord,
    INTIMACY_GUARD,
};
pub use state::{classify, total_trust, Classification, TrustState};

use thiserror::Error;

use crate::anfis::AnfisError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrustError {
    #[error("beta counters must be >= 1, got a={a}, b={b}")]
    LedgerCorrupt { a: f64, b: f64 },
    #[error("no historical data for this node")]
    NoHistory,
    #[error("no indirect reports supplied")]
    NoReports,
    #[error("invalid recommendation from {guarantor}: hops={hops}, value={value}")]
    InvalidRecommendation {
        guarantor: NodeId,
        hops: u32,
        value: f64,
    },
    #[error("invalid data history: horizon={horizon}, t_max={t_max}")]
    InvalidHistory { horizon: f64, t_max: f64 },
    #[error("audit trace: {0}")]
    Audit(String),
    #[error(transparent)]
    Anfis(#[from] AnfisError),
}
