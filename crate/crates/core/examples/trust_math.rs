//! Computes the trust of one node from a hand-built interaction history.

use neurotrust::anfis::{fis_model, DEFAULT_FIS_WEIGHTS};
use neurotrust::trust::{
    behavioral_trust, classify, data_trust, direct_data_trust, total_trust, Aggregation,
    DataHistory, DataRecommendation, InteractionLedger, IntimacyMode, Outcome, Recommendation,
    Staleness,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Node 0 assesses node 1; node 2 also deals with node 1.
    let mut ledger = InteractionLedger::new(3);
    for t in 0..8 {
        let outcome = if t % 4 == 3 {
            Outcome::Failure
        } else {
            Outcome::Success
        };
        ledger.record(0, 1, outcome, 0.5, t as f64);
    }
    ledger.record(2, 1, Outcome::Success, 1.0, 9.0);

    let model = fis_model(3, DEFAULT_FIS_WEIGHTS)?;
    let recs = [Recommendation::new(2, 1, 0.8, 2, 9.0)?];
    let b = behavioral_trust(
        &model,
        &ledger,
        &recs,
        0,
        1,
        IntimacyMode::Normalized,
        Aggregation::Normalized,
    )?;
    println!("inputs (rfi, intimacy, honesty) = {:.3?}", b.inputs);
    println!("direct behavioral trust         = {:.4}", b.direct);
    println!("behavioral trust                = {:.4}", b.aggregate.value);

    let mut history = DataHistory::new(60.0, 1.0)?;
    for (t, r) in [24.8, 25.1, 25.0, 24.9].into_iter().enumerate() {
        history.push(t as f64, r);
    }
    let direct = direct_data_trust(27.5, &history)?;
    let recs = [DataRecommendation {
        value: 0.9,
        hops: 1,
        timestamp: 9.0,
    }];
    let d = data_trust(
        direct,
        &recs,
        10.0,
        Staleness::Linear { horizon: 30.0 },
        Aggregation::Normalized,
    );
    println!("direct data trust               = {direct:.4}");
    println!("data trust                      = {:.4}", d.value);

    let total = total_trust(b.aggregate.value, d.value);
    println!(
        "total trust                     = {total:.4} -> {:?}",
        classify(total, 1.0)
    );
    Ok(())
}
