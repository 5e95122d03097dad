//! A reduced comparator sweep over the malicious fraction, written to a
//! temporary directory and read back through the report path.

use neurotrust::harness::{report, run_experiment, ExperimentSpec};
use neurotrust::simnet::ScenarioConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join("neurotrust-example-sweep");
    let spec = ExperimentSpec {
        base: ScenarioConfig {
            sim_duration: 100.0,
            ..ScenarioConfig::default()
        },
        repetitions: 3,
        output: Some(out.clone()),
        ..ExperimentSpec::default()
    };
    let res = run_experiment(&spec)?;
    println!("{} runs, config hash {}", res.runs.len(), res.config_hash);
    let (table, verdicts) = report(&out)?;
    print!("{table}");
    for v in verdicts {
        println!("{v}");
    }
    Ok(())
}
