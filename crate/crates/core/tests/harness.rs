use std::fs;
use std::path::Path;

use clap::Parser;
use neurotrust::anfis::{fis_model, DEFAULT_FIS_WEIGHTS};
use neurotrust::harness::cli::{
    main_with_args, sweep_spec, Cli, Command, EXIT_FAILURE, EXIT_OK, EXIT_USAGE,
};
use neurotrust::harness::{
    aggregate, gen_training_dataset, parse_range, read_experiment, report, run_experiment,
    verdicts, write_experiment, Comparator, Dataset, ExperimentResult, ExperimentSpec,
    HarnessError, RunRecord, TrainingDatasetSpec,
};
use neurotrust::metrics::MetricReport;
use neurotrust::simnet::ScenarioConfig;
use proptest::prelude::*;

fn small_dataset(fraction: f64) -> TrainingDatasetSpec {
    TrainingDatasetSpec {
        node_count: 20,
        malicious_fractions: vec![fraction],
        scenarios: 2,
        samples_per_node: 3,
        sim_duration: 20.0,
        ..TrainingDatasetSpec::default()
    }
}

fn small_sweep(reps: usize) -> ExperimentSpec {
    ExperimentSpec {
        base: ScenarioConfig {
            node_count: 20,
            sim_duration: 20.0,
            ..ScenarioConfig::default()
        },
        points: vec![0.1, 0.3],
        repetitions: reps,
        model: Some(fis_model(3, DEFAULT_FIS_WEIGHTS).unwrap()),
        ..ExperimentSpec::default()
    }
}

fn without_timestamp(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("# generated_unix="))
        .collect::<Vec<_>>()
        .join("\n")
}

fn args(list: &[&str]) -> Vec<String> {
    std::iter::once("neurotrust")
        .chain(list.iter().copied())
        .map(String::from)
        .collect()
}

// ------------------------------------------------------------------ dataset

#[test]
fn default_dataset_has_500_rows() {
    assert_eq!(
        gen_training_dataset(&TrainingDatasetSpec::default())
            .unwrap()
            .len(),
        500
    );
}

#[test]
fn dataset_row_count_is_scenarios_times_snapshots_times_nodes() {
    let spec = small_dataset(0.2);
    assert_eq!(gen_training_dataset(&spec).unwrap().len(), 2 * 3 * 20);
}

#[test]
fn no_malicious_nodes_means_all_high_targets() {
    let d = gen_training_dataset(&small_dataset(0.0)).unwrap();
    assert!(d.rows.iter().all(|r| !r.malicious && r.target == 0.9));
}

#[test]
fn malicious_share_of_rows_matches_fraction() {
    let d = gen_training_dataset(&small_dataset(0.2)).unwrap();
    let bad = d.rows.iter().filter(|r| r.malicious).count();
    assert_eq!(bad * 5, d.len());
    assert!(d
        .rows
        .iter()
        .filter(|r| r.malicious)
        .all(|r| r.target == 0.1));
}

#[test]
fn dataset_is_deterministic_and_round_trips() {
    let spec = small_dataset(0.3);
    let a = gen_training_dataset(&spec).unwrap();
    let b = gen_training_dataset(&spec).unwrap();
    assert_eq!(a.to_text(), b.to_text());
    assert_eq!(Dataset::from_text(&a.to_text()).unwrap(), a);
    let other = gen_training_dataset(&TrainingDatasetSpec { seed: 2, ..spec }).unwrap();
    assert_ne!(a.to_text(), other.to_text());
}

// --------------------------------------------------------------- experiment

#[test]
fn experiment_covers_every_cell_in_order() {
    let res = run_experiment(&small_sweep(2)).unwrap();
    assert_eq!(res.runs.len(), 2 * 3 * 2);
    assert_eq!(res.aggregates.len(), 2 * 3);
    assert_eq!(res.seeds, (1, 2));
    let keys: Vec<_> = res
        .runs
        .iter()
        .map(|r| (r.point.to_bits(), r.comparator, r.rep))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(res.runs.iter().all(|r| r.seed == 1 + r.rep as u64));
}

#[test]
fn aggregate_mean_is_the_plain_average() {
    let res = run_experiment(&small_sweep(3)).unwrap();
    for row in &res.aggregates {
        let cell: Vec<f64> = res
            .runs
            .iter()
            .filter(|r| r.point == row.point && r.comparator == row.comparator)
            .map(|r| r.report.net_throughput)
            .collect();
        let mean = cell.iter().sum::<f64>() / cell.len() as f64;
        assert_eq!(row.runs, 3);
        assert!((row.net_throughput.mean.unwrap() - mean).abs() < 1e-12);
    }
}

#[test]
fn repetitions_do_not_depend_on_each_other() {
    let two = run_experiment(&small_sweep(2)).unwrap();
    let three = run_experiment(&small_sweep(3)).unwrap();
    for r in &two.runs {
        let twin = three
            .runs
            .iter()
            .find(|t| t.point == r.point && t.comparator == r.comparator && t.rep == r.rep);
        assert_eq!(twin, Some(r));
    }
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let spec = ExperimentSpec {
            output: Some(dir.path().join(name)),
            ..small_sweep(2)
        };
        run_experiment(&spec).unwrap();
    }
    for file in ["runs.csv", "aggregate.csv", "config.txt"] {
        assert_eq!(
            without_timestamp(&dir.path().join("a").join(file)),
            without_timestamp(&dir.path().join("b").join(file))
        );
    }
    let runs = fs::read_to_string(dir.path().join("a/runs.csv")).unwrap();
    assert!(runs.starts_with("# config_hash="));
    assert!(runs.contains("# seeds=1..=2"));
}

#[test]
fn config_hash_tracks_the_configuration() {
    let a = small_sweep(2);
    let b = ExperimentSpec {
        repetitions: 3,
        ..small_sweep(2)
    };
    assert_eq!(a.config_hash(), small_sweep(2).config_hash());
    assert_ne!(a.config_hash(), b.config_hash());
    assert_eq!(a.config_hash().len(), 64);
}

// ------------------------------------------------------------------- report

#[test]
fn verdicts_from_csv_match_verdicts_from_memory() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ExperimentSpec {
        output: Some(dir.path().to_path_buf()),
        ..small_sweep(2)
    };
    let res = run_experiment(&spec).unwrap();
    let back = read_experiment(dir.path()).unwrap();
    assert_eq!(back.runs, res.runs);
    assert_eq!(back.aggregates, res.aggregates);
    assert_eq!(back.config_hash, res.config_hash);
    let (_, vs) = report(dir.path()).unwrap();
    assert_eq!(vs, verdicts(&res));
}

fn fabricated(pfr: &[(f64, f64, f64, f64)]) -> ExperimentResult {
    // (point, aodv, fis, anfis) pfr values; throughput follows pfr.
    let mut runs = Vec::new();
    for &(point, a, f, n) in pfr {
        for (comparator, v, aecr) in [
            (Comparator::Aodv, a, 0.0),
            (Comparator::FisTrust, f, 0.5),
            (Comparator::AnfisTmm, n, 0.4),
        ] {
            runs.push(RunRecord {
                point,
                comparator,
                rep: 0,
                seed: 1,
                report: MetricReport {
                    generated: 100,
                    delivered: (v * 100.0) as u64,
                    pfr: Some(v),
                    net_throughput: v * 10.0,
                    aecr: Some(aecr),
                    accuracy: None,
                    f_measure: None,
                },
            });
        }
    }
    ExperimentResult {
        variable: "malicious_fraction".into(),
        config_hash: "0".repeat(64),
        seeds: (1, 1),
        aggregates: aggregate(&runs),
        runs,
    }
}

#[test]
fn report_flags_fabricated_trends() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ExperimentSpec {
        points: vec![0.1, 0.5],
        repetitions: 1,
        ..ExperimentSpec::default()
    };
    let good = fabricated(&[(0.1, 0.9, 0.92, 0.95), (0.5, 0.4, 0.45, 0.6)]);
    write_experiment(dir.path(), &spec, &good).unwrap();
    let (table, vs) = report(dir.path()).unwrap();
    assert!(table.contains("anfis_tmm"));
    assert!(vs.iter().all(|v| v.pass), "{vs:?}");

    let bad = fabricated(&[(0.1, 0.4, 0.5, 0.5), (0.5, 0.9, 0.92, 0.91)]);
    write_experiment(dir.path(), &spec, &bad).unwrap();
    let (_, vs) = report(dir.path()).unwrap();
    let failed: Vec<&str> = vs
        .iter()
        .filter(|v| !v.pass)
        .map(|v| v.name.as_str())
        .collect();
    assert!(failed.contains(&"pfr_aodv_non_increasing"));
    assert!(failed.contains(&"pfr_anfis_margin_at_max"));
}

#[test]
fn missing_repetition_is_reported_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ExperimentSpec {
        points: vec![0.1, 0.5],
        repetitions: 1,
        ..ExperimentSpec::default()
    };
    let mut res = fabricated(&[(0.1, 0.9, 0.92, 0.95), (0.5, 0.4, 0.45, 0.6)]);
    res.runs
        .retain(|r| !(r.point == 0.5 && r.comparator == Comparator::FisTrust));
    write_experiment(dir.path(), &spec, &res).unwrap();
    match read_experiment(dir.path()) {
        Err(HarnessError::Incomplete(missing)) => {
            assert_eq!(
                missing,
                vec!["malicious_fraction=0.5 comparator=fis_trust rep=0".to_string()]
            )
        }
        other => panic!("expected incomplete, got {other:?}"),
    }
}

#[test]
fn missing_runs_file_is_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        matches!(read_experiment(dir.path()), Err(HarnessError::Incomplete(m)) if m == ["runs.csv"])
    );
}

// ---------------------------------------------------------------------- cli

#[test]
fn sweep_arguments_build_the_expected_spec() {
    let cli = Cli::try_parse_from(args(&[
        "sweep",
        "--malicious",
        "0.1:0.5:0.1",
        "--reps",
        "20",
        "--seed",
        "7",
    ]))
    .unwrap();
    let Command::Sweep(a) = cli.command else {
        panic!("not a sweep")
    };
    let spec = sweep_spec(&a).unwrap();
    assert_eq!(spec.points, vec![0.1, 0.2, 0.3, 0.4, 0.5]);
    assert_eq!(spec.repetitions, 20);
    assert_eq!(spec.base_seed, 7);
    assert_eq!(spec.comparators, Comparator::ALL.to_vec());
}

#[test]
fn run_arguments_override_only_what_they_name() {
    let cli = Cli::try_parse_from(args(&["run", "--nodes", "50", "--range", "250"])).unwrap();
    let Command::Run(a) = cli.command else {
        panic!("not a run")
    };
    let cfg = a.scenario.scenario().unwrap();
    assert_eq!(
        cfg,
        ScenarioConfig {
            node_count: 50,
            tx_range: 250.0,
            ..ScenarioConfig::default()
        }
    );
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(main_with_args(args(&[])), EXIT_USAGE);
    assert_eq!(main_with_args(args(&["frobnicate"])), EXIT_USAGE);
    assert_eq!(
        main_with_args(args(&["sweep", "--reps", "many"])),
        EXIT_USAGE
    );
    assert_eq!(
        main_with_args(args(&["sweep", "--comparators", "aodv,magic"])),
        EXIT_USAGE
    );
    assert_eq!(
        main_with_args(args(&["sweep", "--malicious", "0.5:0.1:0.1"])),
        EXIT_USAGE
    );
    assert_eq!(
        main_with_args(args(&["run", "--set", "no_such_key=1"])),
        EXIT_USAGE
    );
    assert_eq!(main_with_args(args(&["--help"])), EXIT_OK);
}

#[test]
fn runtime_errors_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nothing");
    assert_eq!(
        main_with_args(args(&["report", missing.to_str().unwrap()])),
        EXIT_FAILURE
    );
    let model = dir.path().join("absent.model");
    assert_eq!(
        main_with_args(args(&["run", "--model", model.to_str().unwrap()])),
        EXIT_FAILURE
    );
}

#[test]
fn dataset_training_and_run_commands_chain() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.tsv");
    let model = dir.path().join("model.txt");
    let log = dir.path().join("run.log");
    let d = data.to_str().unwrap();
    let m = model.to_str().unwrap();
    let gen = [
        "gen-dataset",
        "--nodes",
        "20",
        "--scenarios",
        "2",
        "--samples",
        "3",
        "--duration",
        "20",
        "--out",
        d,
    ];
    assert_eq!(main_with_args(args(&gen)), EXIT_OK);
    assert_eq!(Dataset::load(&data).unwrap().len(), 120);
    assert_eq!(
        main_with_args(args(&[
            "train-anfis",
            "--data",
            d,
            "--epochs",
            "5",
            "--out",
            m
        ])),
        EXIT_OK
    );
    let run = [
        "run",
        "--nodes",
        "20",
        "--duration",
        "20",
        "--model",
        m,
        "--log",
        log.to_str().unwrap(),
    ];
    assert_eq!(main_with_args(args(&run)), EXIT_OK);
    assert!(fs::read_to_string(&log).unwrap().lines().count() > 0);
}

#[test]
fn sweep_then_report_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let o = out.to_str().unwrap();
    let sweep = [
        "sweep",
        "--nodes",
        "15",
        "--duration",
        "15",
        "--malicious",
        "0.1:0.2:0.1",
        "--reps",
        "1",
        "--comparators",
        "aodv,fis_trust",
        "--out",
        o,
    ];
    assert_eq!(main_with_args(args(&sweep)), EXIT_OK);
    assert_eq!(main_with_args(args(&["report", o])), EXIT_OK);
    assert_eq!(read_experiment(&out).unwrap().runs.len(), 4);
}

// ------------------------------------------------------------------- ranges

#[test]
fn single_value_and_malformed_ranges() {
    assert_eq!(parse_range("0.25").unwrap(), vec![0.25]);
    for bad in [
        "",
        "a",
        "0.1:0.5",
        "0.1:0.5:0",
        "0.1:0.5:-1",
        "0.5:0.1:0.1",
        "0:1:x",
    ] {
        assert!(
            matches!(parse_range(bad), Err(HarnessError::Usage(_))),
            "{bad}"
        );
    }
}

proptest! {
    #[test]
    fn ranges_are_evenly_spaced_and_inclusive(start in 0u32..50, steps in 0u32..20, step in 1u32..20) {
        let (a, s) = (start as f64 / 100.0, step as f64 / 100.0);
        let b = a + steps as f64 * s;
        let v = parse_range(&format!("{a}:{b}:{s}")).unwrap();
        prop_assert_eq!(v.len(), steps as usize + 1);
        prop_assert!((v[0] - a).abs() < 1e-9);
        prop_assert!((v[v.len() - 1] - b).abs() < 1e-9);
        for w in v.windows(2) {
            prop_assert!((w[1] - w[0] - s).abs() < 1e-8);
        }
    }
}
