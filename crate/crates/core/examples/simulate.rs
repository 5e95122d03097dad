//! Runs one scenario with and without trust management and prints the
//! network metrics.

use neurotrust::anfis::{fis_model, DEFAULT_FIS_WEIGHTS};
use neurotrust::metrics::MetricReport;
use neurotrust::simnet::{run, MaliciousKind, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = ScenarioConfig {
        malicious_fraction: 0.3,
        malicious_kind: MaliciousKind::Mixed,
        ..ScenarioConfig::default()
    };
    let model = fis_model(3, DEFAULT_FIS_WEIGHTS)?;
    for trust in [false, true] {
        let cfg = ScenarioConfig {
            trust_enabled: trust,
            ..base.clone()
        };
        let log = run(&cfg, trust.then_some(&model))?;
        let m = MetricReport::from_log(&log);
        println!(
            "trust {trust:<5}: {} events, generated {}, delivered {}, pfr {:?}, throughput {:.2} pkt/s, aecr {:?}",
            log.entries.len(),
            m.generated,
            m.delivered,
            m.pfr,
            m.net_throughput,
            m.aecr
        );
    }
    Ok(())
}
