//! Generates a labelled dataset from simulated traffic, trains a 3-term
//! model on it and saves the result.

use neurotrust::anfis::{persist, train_hybrid, AnfisModel, TrainingConfig};
use neurotrust::harness::{gen_training_dataset, TrainingDatasetSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = gen_training_dataset(&TrainingDatasetSpec::default())?;
    println!(
        "{} rows, {} malicious",
        data.len(),
        data.rows.iter().filter(|r| r.malicious).count()
    );

    let (model, report) = train_hybrid(
        &AnfisModel::grid(3)?,
        &data.samples(),
        &TrainingConfig::default(),
    )?;
    println!(
        "rmse {:.4} -> {:.4} over {} epochs",
        report.initial_rmse(),
        report.final_rmse(),
        report.loss_history.len()
    );

    let path = std::env::temp_dir().join("neurotrust-example.model");
    persist::save(&model, &path)?;
    let back = persist::load(&path)?;
    println!("saved to {}", path.display());
    for row in data.rows.iter().take(4) {
        println!(
            "  malicious {:<5} inputs {:.3?} -> {:.4}",
            row.malicious,
            row.inputs,
            back.evaluate(row.inputs)?
        );
    }
    Ok(())
}
