//! Command line front end. Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::anfis::{
    fis_model, persist, train_hybrid, AnfisModel, TrainingConfig, DEFAULT_FIS_WEIGHTS,
};
use crate::metrics::MetricReport;
use crate::simnet::{MaliciousKind, ScenarioConfig, Simulator};

use super::{
    gen_training_dataset, parse_range, report, run_experiment, summary_table, train_default_model,
    verdicts, Comparator, Dataset, ExperimentSpec, HarnessError, LabelSource, ObserverChoice,
    TrainingDatasetSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "neurotrust",
    version,
    about = "Trust-managed multihop IoT network simulator and experiment harness"
)]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and print its metrics.
    Run(RunArgs),
    /// Sweep a config key over comparators and repetitions, writing CSVs.
    Sweep(SweepArgs),
    /// Generate a training dataset for the behavioral model.
    GenDataset(DatasetArgs),
    /// Train a behavioral model and save it.
    TrainAnfis(TrainArgs),
    /// Summarize an experiment directory and print trend verdicts.
    Report(ReportArgs),
}

/// Scenario settings shared by `run` and `sweep`. Flags override the config file.
#[derive(Debug, Args, Default)]
pub struct ScenarioArgs {
    /// Scenario config file (key=value lines, '#' comments).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    pub nodes: Option<usize>,
    /// Transmission range in meters.
    #[arg(long, value_name = "M")]
    pub range: Option<f64>,
    /// Node speed in m/s.
    #[arg(long, value_name = "MPS")]
    pub speed: Option<f64>,
    /// Malicious behavior: hide, drop or mixed.
    #[arg(long, value_name = "KIND")]
    pub kind: Option<MaliciousKind>,
    /// Simulated seconds.
    #[arg(long, value_name = "S")]
    pub duration: Option<f64>,
    /// Any scenario key, as KEY=VALUE; repeatable and applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl ScenarioArgs {
    pub fn scenario(&self) -> Result<ScenarioConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?;
                ScenarioConfig::from_text(&text)
                    .map_err(|e| HarnessError::Usage(format!("{}: {e}", p.display())))?
            }
            None => ScenarioConfig::default(),
        };
        if let Some(v) = self.nodes {
            cfg.node_count = v;
        }
        if let Some(v) = self.range {
            cfg.tx_range = v;
        }
        if let Some(v) = self.speed {
            cfg.speed = v;
        }
        if let Some(v) = self.kind {
            cfg.malicious_kind = v;
        }
        if let Some(v) = self.duration {
            cfg.sim_duration = v;
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                HarnessError::Usage(format!("--set expects KEY=VALUE, got {kv:?}"))
            })?;
            cfg.set(k.trim(), v)
                .map_err(|e| HarnessError::Usage(format!("--set: {e}")))?;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Fraction of malicious nodes.
    #[arg(long, value_name = "F")]
    pub malicious: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Disable trust management (plain routing).
    #[arg(long)]
    pub no_trust: bool,
    /// Behavioral model file; defaults to a freshly trained one.
    #[arg(long, value_name = "FILE", conflicts_with = "fis")]
    pub model: Option<PathBuf>,
    /// Use the fixed-rule behavioral model instead of a trained one.
    #[arg(long)]
    pub fis: bool,
    /// Terms per input for the default models.
    #[arg(long, default_value_t = 3)]
    pub terms: usize,
    /// Write the event log here.
    #[arg(long, value_name = "FILE")]
    pub log: Option<PathBuf>,
    /// Write the trust audit trail here.
    #[arg(long, value_name = "FILE")]
    pub audit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Malicious fractions as start:end:step (shorthand for --variable malicious_fraction --points).
    #[arg(long, value_name = "RANGE", conflicts_with_all = ["points", "variable"])]
    pub malicious: Option<String>,
    /// Scenario key to sweep.
    #[arg(long, value_name = "KEY")]
    pub variable: Option<String>,
    /// Sweep values as start:end:step or a single value.
    #[arg(long, value_name = "RANGE")]
    pub points: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    /// Base seed; repetition r uses seed + r.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Comma-separated subset of aodv, fis_trust, anfis_tmm.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub comparators: Option<Vec<Comparator>>,
    /// Trained model for anfis_tmm; trained on demand when absent.
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub terms: usize,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "results")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    #[arg(long, default_value_t = 50)]
    pub nodes: usize,
    /// Comma-separated malicious fractions, cycled over scenarios.
    #[arg(long, value_delimiter = ',', default_value = "0.2")]
    pub malicious: Vec<f64>,
    #[arg(long, default_value = "mixed")]
    pub kind: MaliciousKind,
    #[arg(long, default_value_t = 10)]
    pub scenarios: usize,
    /// Snapshots per scenario.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 60.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Use empirical success rates as targets instead of fixed class labels.
    #[arg(long)]
    pub soft_labels: bool,
    /// Record each node as seen by its busiest observer instead of a random one.
    #[arg(long)]
    pub primary_observer: bool,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset file; the default dataset is generated when absent.
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub terms: usize,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub learning_rate: f64,
    /// Keep only this many rules, ranked by firing strength on the data.
    #[arg(long, value_name = "N")]
    pub prune: Option<usize>,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Experiment directory written by `sweep`.
    pub dir: PathBuf,
    /// Exit with status 1 when any verdict fails.
    #[arg(long)]
    pub strict: bool,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(HarnessError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn load_model(path: &Path) -> Result<AnfisModel, HarnessError> {
    persist::load(path).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn execute(cmd: Command) -> Result<i32, HarnessError> {
    match cmd {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::GenDataset(a) => cmd_dataset(a),
        Command::TrainAnfis(a) => cmd_train(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

fn cmd_run(a: RunArgs) -> Result<i32, HarnessError> {
    let mut cfg = a.scenario.scenario()?;
    if let Some(f) = a.malicious {
        cfg.malicious_fraction = f;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.no_trust {
        cfg.trust_enabled = false;
    }
    cfg.validate()
        .map_err(|e| HarnessError::Usage(e.to_string()))?;
    let model = if !cfg.trust_enabled {
        None
    } else if let Some(p) = &a.model {
        Some(load_model(p)?)
    } else if a.fis {
        Some(fis_model(a.terms, DEFAULT_FIS_WEIGHTS)?)
    } else {
        Some(train_default_model(a.terms)?)
    };
    let mut sim = Simulator::new(&cfg, model.as_ref())?;
    if a.audit.is_some() {
        sim.record_audit();
    }
    let out = sim.finish()?;
    if let Some(p) = &a.log {
        std::fs::write(p, out.log.to_text()).map_err(|e| HarnessError::io(p, e))?;
    }
    if let Some(p) = &a.audit {
        std::fs::write(p, out.audit.to_text()).map_err(|e| HarnessError::io(p, e))?;
    }
    let m = MetricReport::from_log(&out.log);
    println!("generated\t{}", m.generated);
    println!("delivered\t{}", m.delivered);
    println!("pfr\t{}", opt(m.pfr));
    println!("net_throughput\t{:.4}", m.net_throughput);
    println!("aecr\t{}", opt(m.aecr));
    println!("accuracy\t{}", opt(m.accuracy));
    println!("f_measure\t{}", opt(m.f_measure));
    Ok(EXIT_OK)
}

pub fn sweep_spec(a: &SweepArgs) -> Result<ExperimentSpec, HarnessError> {
    let mut spec = ExperimentSpec {
        base: a.scenario.scenario()?,
        repetitions: a.reps,
        base_seed: a.seed,
        terms: a.terms,
        output: Some(a.out.clone()),
        ..ExperimentSpec::default()
    };
    if let Some(r) = &a.malicious {
        spec.points = parse_range(r)?;
    }
    if let Some(v) = &a.variable {
        spec.variable = v.clone();
    }
    if let Some(p) = &a.points {
        spec.points = parse_range(p)?;
    }
    if let Some(c) = &a.comparators {
        spec.comparators = c.clone();
    }
    if let Some(p) = &a.model {
        spec.model = Some(load_model(p)?);
    }
    spec.validate().map_err(|e| match e {
        HarnessError::Sim(s) => HarnessError::Usage(s.to_string()),
        e => e,
    })?;
    Ok(spec)
}

fn cmd_sweep(a: SweepArgs) -> Result<i32, HarnessError> {
    let spec = sweep_spec(&a)?;
    let res = run_experiment(&spec)?;
    print!("{}", summary_table(&res));
    for v in verdicts(&res) {
        println!("{v}");
    }
    println!("wrote {}", a.out.display());
    Ok(EXIT_OK)
}

fn cmd_dataset(a: DatasetArgs) -> Result<i32, HarnessError> {
    let spec = TrainingDatasetSpec {
        node_count: a.nodes,
        malicious_fractions: a.malicious,
        malicious_kind: a.kind,
        scenarios: a.scenarios,
        samples_per_node: a.samples,
        sim_duration: a.duration,
        seed: a.seed,
        labels: if a.soft_labels {
            LabelSource::Soft
        } else {
            LabelSource::default()
        },
        observer: if a.primary_observer {
            ObserverChoice::Primary
        } else {
            ObserverChoice::Random
        },
        ..TrainingDatasetSpec::default()
    };
    let data = gen_training_dataset(&spec)?;
    data.save(&a.out)?;
    println!("wrote {} rows to {}", data.len(), a.out.display());
    Ok(EXIT_OK)
}

fn cmd_train(a: TrainArgs) -> Result<i32, HarnessError> {
    let data = match &a.data {
        Some(p) => Dataset::load(p)?,
        None => gen_training_dataset(&super::ComparisonSpec::default().train)?,
    };
    let mut model = AnfisModel::grid(a.terms)?;
    if let Some(keep) = a.prune {
        let inputs: Vec<_> = data.rows.iter().map(|r| r.inputs).collect();
        model.prune_rules(&inputs, keep)?;
    }
    let config = TrainingConfig {
        epochs: a.epochs,
        learning_rate: a.learning_rate,
        ..TrainingConfig::default()
    };
    config
        .validate()
        .map_err(|e| HarnessError::Usage(e.to_string()))?;
    let (model, rep) = train_hybrid(&model, &data.samples(), &config)?;
    persist::save(&model, &a.out).map_err(|e| HarnessError::io(&a.out, e))?;
    println!(
        "trained on {} rows: rmse {:.4} -> {:.4} over {} epochs; wrote {}",
        data.len(),
        rep.initial_rmse(),
        rep.final_rmse(),
        rep.loss_history.len(),
        a.out.display()
    );
    Ok(EXIT_OK)
}

fn cmd_report(a: ReportArgs) -> Result<i32, HarnessError> {
    let (table, vs) = report(&a.dir)?;
    print!("{table}");
    for v in &vs {
        println!("{v}");
    }
    Ok(if a.strict && vs.iter().any(|v| !v.pass) {
        EXIT_FAILURE
    } else {
        EXIT_OK
    })
}
