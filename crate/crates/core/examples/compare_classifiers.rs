//! Scores the trained model against the fixed-rule baseline on held-out
//! scenarios.

use neurotrust::harness::{compare_classifiers, ComparisonSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for terms in [3, 5] {
        let c = compare_classifiers(&ComparisonSpec {
            terms,
            ..ComparisonSpec::default()
        })?;
        println!(
            "{terms} terms, {} training rows, {} test rows",
            c.train_rows, c.test_rows
        );
        for (name, s) in [("anfis", &c.anfis), ("fis", &c.fis)] {
            println!(
                "  {name:<5} accuracy {:?} f-measure {:?} {:?}",
                s.accuracy, s.f_measure, s.confusion
            );
        }
    }
    Ok(())
}
