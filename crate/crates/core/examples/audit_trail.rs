//! Records every trust evaluation of a run and shows the first few.

use neurotrust::anfis::{fis_model, DEFAULT_FIS_WEIGHTS};
use neurotrust::simnet::{ScenarioConfig, Simulator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ScenarioConfig {
        malicious_fraction: 0.2,
        sim_duration: 30.0,
        ..ScenarioConfig::default()
    };
    let model = fis_model(3, DEFAULT_FIS_WEIGHTS)?;
    let mut sim = Simulator::new(&cfg, Some(&model))?;
    sim.record_audit();
    let out = sim.finish()?;
    println!("{} evaluations recorded", out.audit.len());
    for r in out.audit.records().iter().take(5) {
        println!("{}", r.to_line());
    }
    if let Some(states) = &out.trust {
        let distrusted = states
            .iter()
            .filter(|s| !matches!(s.classification, neurotrust::trust::Classification::Trusted))
            .count();
        println!(
            "{distrusted} of {} nodes end below the trust threshold",
            states.len()
        );
    }
    Ok(())
}
