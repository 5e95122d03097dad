//! Comparator sweeps: one scenario run per (point, comparator, repetition),
//! per-run and aggregate CSV files, and trend verdicts read back from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::anfis::{fis_model, persist, train_hybrid, AnfisModel, DEFAULT_FIS_WEIGHTS};
use crate::metrics::{summarize, MetricReport, Summary};
use crate::simnet::{run, EventLog, ScenarioConfig};

use super::{gen_training_dataset, ComparisonSpec, HarnessError};

/// Environment variable capping the worker pool.
pub const WORKERS_ENV: &str = "NEUROTRUST_WORKERS";

pub const RUNS_FILE: &str = "runs.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Comparator {
    /// Plain routing, trust disabled.
    Aodv,
    /// Trust enabled with the fixed-rule behavioral model.
    FisTrust,
    /// Trust enabled with the trained behavioral model.
    AnfisTmm,
}

impl Comparator {
    pub const ALL: [Comparator; 3] = [Comparator::Aodv, Comparator::FisTrust, Comparator::AnfisTmm];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Aodv => "aodv",
            Self::FisTrust => "fis_trust",
            Self::AnfisTmm => "anfis_tmm",
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Comparator {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aodv" => Ok(Self::Aodv),
            "fis_trust" => Ok(Self::FisTrust),
            "anfis_tmm" => Ok(Self::AnfisTmm),
            _ => Err(HarnessError::Usage(format!(
                "unknown comparator {s:?} (aodv, fis_trust, anfis_tmm)"
            ))),
        }
    }
}

/// Inclusive `start:end:step` range, rounded to 1e-9 to absorb float drift.
pub fn parse_range(text: &str) -> Result<Vec<f64>, HarnessError> {
    let bad = || {
        HarnessError::Usage(format!(
            "invalid range {text:?}; expected start:end:step or a single value"
        ))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [a, b, s] => {
            let (a, b, s) = (num(a)?, num(b)?, num(s)?);
            if !(s > 0.0) || !a.is_finite() || !b.is_finite() || b < a {
                return Err(bad());
            }
            let n = ((b - a) / s + 1e-9).floor() as usize;
            Ok((0..=n)
                .map(|i| ((a + i as f64 * s) * 1e9).round() / 1e9)
                .collect())
        }
        _ => Err(bad()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub base: ScenarioConfig,
    /// Scenario config key swept over `points`.
    pub variable: String,
    pub points: Vec<f64>,
    pub comparators: Vec<Comparator>,
    pub repetitions: usize,
    /// Repetition r runs with seed `base_seed + r`.
    pub base_seed: u64,
    pub output: Option<PathBuf>,
    /// Trained model for `anfis_tmm`; trained on demand when absent.
    pub model: Option<AnfisModel>,
    /// Terms per input for on-demand training and the fixed-rule model.
    pub terms: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            base: ScenarioConfig::default(),
            variable: "malicious_fraction".into(),
            points: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            comparators: Comparator::ALL.to_vec(),
            repetitions: 20,
            base_seed: 1,
            output: None,
            model: None,
            terms: 3,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.repetitions == 0 {
            return Err(HarnessError::Usage("repetitions must be at least 1".into()));
        }
        if self.points.is_empty() || self.comparators.is_empty() {
            return Err(HarnessError::Usage(
                "sweep needs at least one point and one comparator".into(),
            ));
        }
        for &p in &self.points {
            self.scenario(p, Comparator::Aodv, 0)?.validate()?;
        }
        Ok(())
    }

    pub fn seed(&self, rep: usize) -> u64 {
        self.base_seed.wrapping_add(rep as u64)
    }

    pub fn scenario(
        &self,
        point: f64,
        comparator: Comparator,
        rep: usize,
    ) -> Result<ScenarioConfig, HarnessError> {
        let mut cfg = self.base.clone();
        cfg.set(&self.variable, &point.to_string())?;
        cfg.seed = self.seed(rep);
        cfg.trust_enabled = comparator != Comparator::Aodv;
        cfg.repetitions = self.repetitions;
        Ok(cfg)
    }

    /// Canonical text of everything that determines the outputs.
    pub fn canonical_text(&self) -> String {
        let mut s = self.base.to_text();
        let pts: Vec<String> = self.points.iter().map(|p| format!("{p:?}")).collect();
        let cmp: Vec<&str> = self.comparators.iter().map(|c| c.as_str()).collect();
        s.push_str(&format!(
            "sweep.variable={}\nsweep.points={}\nsweep.comparators={}\nsweep.repetitions={}\nsweep.base_seed={}\nsweep.terms={}\n",
            self.variable,
            pts.join(","),
            cmp.join(","),
            self.repetitions,
            self.base_seed,
            self.terms
        ));
        if let Some(m) = &self.model {
            s.push_str(&persist::to_text(m));
        }
        s
    }

    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub point: f64,
    pub comparator: Comparator,
    pub rep: usize,
    pub seed: u64,
    pub report: MetricReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub point: f64,
    pub comparator: Comparator,
    pub runs: usize,
    pub pfr: Summary,
    pub net_throughput: Summary,
    pub aecr: Summary,
    pub accuracy: Summary,
    pub f_measure: Summary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub variable: String,
    pub config_hash: String,
    pub seeds: (u64, u64),
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<AggregateRow>,
}

impl ExperimentResult {
    pub fn aggregate(&self, point: f64, comparator: Comparator) -> Option<&AggregateRow> {
        self.aggregates
            .iter()
            .find(|a| a.point == point && a.comparator == comparator)
    }
}

/// Trains a behavioral model on the default generated dataset.
pub fn train_default_model(terms: usize) -> Result<AnfisModel, HarnessError> {
    let spec = ComparisonSpec {
        terms,
        ..ComparisonSpec::default()
    };
    let data = gen_training_dataset(&spec.train)?;
    let (model, _) = train_hybrid(&AnfisModel::grid(terms)?, &data.samples(), &spec.training)?;
    Ok(model)
}

fn worker_pool() -> Result<rayon::ThreadPool, HarnessError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| HarnessError::Usage(format!("worker pool: {e}")))
}

/// Runs one sweep cell.
fn run_cell(
    spec: &ExperimentSpec,
    point: f64,
    comparator: Comparator,
    rep: usize,
    models: &BTreeMap<Comparator, AnfisModel>,
) -> Result<(RunRecord, EventLog), HarnessError> {
    let cfg = spec.scenario(point, comparator, rep)?;
    let log = run(&cfg, models.get(&comparator))?;
    let record = RunRecord {
        point,
        comparator,
        rep,
        seed: cfg.seed,
        report: MetricReport::from_log(&log),
    };
    Ok((record, log))
}

/// Runs every cell of the sweep and writes CSVs when an output directory is set.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult, HarnessError> {
    run_experiment_with(spec, |_, _| Ok(()))
}

/// Like [`run_experiment`], also handing every event log to `sink`.
pub fn run_experiment_with<F>(
    spec: &ExperimentSpec,
    sink: F,
) -> Result<ExperimentResult, HarnessError>
where
    F: Fn(&RunRecord, &EventLog) -> Result<(), HarnessError> + Sync,
{
    spec.validate()?;
    let mut models = BTreeMap::new();
    if spec.comparators.contains(&Comparator::FisTrust) {
        models.insert(
            Comparator::FisTrust,
            fis_model(spec.terms, DEFAULT_FIS_WEIGHTS)?,
        );
    }
    if spec.comparators.contains(&Comparator::AnfisTmm) {
        let m = match &spec.model {
            Some(m) => m.clone(),
            None => train_default_model(spec.terms)?,
        };
        models.insert(Comparator::AnfisTmm, m);
    }
    let mut cells = Vec::new();
    for &p in &spec.points {
        for &c in &spec.comparators {
            for r in 0..spec.repetitions {
                cells.push((p, c, r));
            }
        }
    }
    let pool = worker_pool()?;
    let mut runs: Vec<RunRecord> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(p, c, r)| {
                let wrap = |e: HarnessError| HarnessError::RunFailed {
                    variable: spec.variable.clone(),
                    point: p,
                    comparator: c.to_string(),
                    seed: spec.seed(r),
                    source: Box::new(e),
                };
                let (rec, log) = run_cell(spec, p, c, r, &models).map_err(wrap)?;
                sink(&rec, &log).map_err(wrap)?;
                Ok(rec)
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    })?;
    sort_runs(&mut runs);
    let result = ExperimentResult {
        variable: spec.variable.clone(),
        config_hash: spec.config_hash(),
        seeds: (spec.seed(0), spec.seed(spec.repetitions - 1)),
        aggregates: aggregate(&runs),
        runs,
    };
    if let Some(dir) = &spec.output {
        write_experiment(dir, spec, &result)?;
    }
    Ok(result)
}

fn sort_runs(runs: &mut [RunRecord]) {
    runs.sort_by(|a, b| {
        a.point
            .total_cmp(&b.point)
            .then(a.comparator.cmp(&b.comparator))
            .then(a.rep.cmp(&b.rep))
    });
}

/// Mean and sample std per (point, comparator).
pub fn aggregate(runs: &[RunRecord]) -> Vec<AggregateRow> {
    let mut sorted = runs.to_vec();
    sort_runs(&mut sorted);
    sorted
        .chunk_by(|a, b| a.point == b.point && a.comparator == b.comparator)
        .map(|rs| AggregateRow {
            point: rs[0].point,
            comparator: rs[0].comparator,
            runs: rs.len(),
            pfr: summarize(rs.iter().map(|r| r.report.pfr)),
            net_throughput: summarize(rs.iter().map(|r| Some(r.report.net_throughput))),
            aecr: summarize(rs.iter().map(|r| r.report.aecr)),
            accuracy: summarize(rs.iter().map(|r| r.report.accuracy)),
            f_measure: summarize(rs.iter().map(|r| r.report.f_measure)),
        })
        .collect()
}

// ---------------------------------------------------------------- CSV files

const RUN_COLUMNS: [&str; 12] = [
    "variable",
    "point",
    "comparator",
    "rep",
    "seed",
    "generated",
    "delivered",
    "pfr",
    "net_throughput",
    "aecr",
    "accuracy",
    "f_measure",
];

const METRICS: [&str; 5] = ["pfr", "net_throughput", "aecr", "accuracy", "f_measure"];

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn header(spec: &ExperimentSpec, result: &ExperimentResult) -> String {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let pts: Vec<String> = spec.points.iter().map(|p| format!("{p:?}")).collect();
    let cmp: Vec<&str> = spec.comparators.iter().map(|c| c.as_str()).collect();
    format!(
        "# config_hash={}\n# seeds={}..={}\n# variable={}\n# points={}\n# comparators={}\n# repetitions={}\n# generated_unix={}\n",
        result.config_hash,
        result.seeds.0,
        result.seeds.1,
        spec.variable,
        pts.join(","),
        cmp.join(","),
        spec.repetitions,
        stamp
    )
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> HarnessError + '_ {
    move |e| HarnessError::io(path, e)
}

pub fn runs_csv(runs: &[RunRecord], variable: &str) -> Result<String, HarnessError> {
    let p = Path::new(RUNS_FILE);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RUN_COLUMNS).map_err(csv_err(p))?;
    for r in runs {
        let m = &r.report;
        w.write_record([
            variable.to_string(),
            format!("{:?}", r.point),
            r.comparator.to_string(),
            r.rep.to_string(),
            r.seed.to_string(),
            m.generated.to_string(),
            m.delivered.to_string(),
            cell(m.pfr),
            cell(Some(m.net_throughput)),
            cell(m.aecr),
            cell(m.accuracy),
            cell(m.f_measure),
        ])
        .map_err(csv_err(p))?;
    }
    Ok(
        String::from_utf8(w.into_inner().map_err(|e| HarnessError::io(p, e))?)
            .expect("csv output is utf-8"),
    )
}

pub fn aggregate_csv(rows: &[AggregateRow], variable: &str) -> Result<String, HarnessError> {
    let p = Path::new(AGGREGATE_FILE);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut cols = vec![
        "variable".to_string(),
        "point".into(),
        "comparator".into(),
        "runs".into(),
    ];
    for m in METRICS {
        cols.push(format!("{m}_mean"));
        cols.push(format!("{m}_std"));
    }
    w.write_record(&cols).map_err(csv_err(p))?;
    for a in rows {
        let mut rec = vec![
            variable.to_string(),
            format!("{:?}", a.point),
            a.comparator.to_string(),
            a.runs.to_string(),
        ];
        for s in [a.pfr, a.net_throughput, a.aecr, a.accuracy, a.f_measure] {
            rec.push(cell(s.mean));
            rec.push(cell(s.std));
        }
        w.write_record(&rec).map_err(csv_err(p))?;
    }
    Ok(
        String::from_utf8(w.into_inner().map_err(|e| HarnessError::io(p, e))?)
            .expect("csv output is utf-8"),
    )
}

pub fn write_experiment(
    dir: &Path,
    spec: &ExperimentSpec,
    result: &ExperimentResult,
) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let head = header(spec, result);
    for (name, body) in [
        (RUNS_FILE, runs_csv(&result.runs, &result.variable)?),
        (
            AGGREGATE_FILE,
            aggregate_csv(&result.aggregates, &result.variable)?,
        ),
    ] {
        let path = dir.join(name);
        fs::write(&path, format!("{head}{body}")).map_err(|e| HarnessError::io(&path, e))?;
    }
    fs::write(dir.join("config.txt"), spec.canonical_text())
        .map_err(|e| HarnessError::io(dir, e))?;
    Ok(())
}

/// Splits the `# key=value` provenance lines from the CSV body.
fn split_header(text: &str) -> (BTreeMap<String, String>, String) {
    let mut meta = BTreeMap::new();
    let mut body = String::new();
    for line in text.lines() {
        match line.strip_prefix("# ").and_then(|l| l.split_once('=')) {
            Some((k, v)) if body.is_empty() => {
                meta.insert(k.to_string(), v.to_string());
            }
            _ => {
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    (meta, body)
}

fn opt(s: &str, line: usize) -> Result<Option<f64>, HarnessError> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| HarnessError::Parse {
        line,
        message: format!("bad number {s:?}"),
    })
}

fn parse_runs(body: &str) -> Result<(String, Vec<RunRecord>), HarnessError> {
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let mut variable = String::new();
    let mut runs = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| HarnessError::Parse {
            line,
            message: e.to_string(),
        })?;
        if rec.len() != RUN_COLUMNS.len() {
            return Err(HarnessError::Parse {
                line,
                message: format!("expected {} columns", RUN_COLUMNS.len()),
            });
        }
        let bad = |m: &str| HarnessError::Parse {
            line,
            message: m.to_string(),
        };
        variable = rec[0].to_string();
        runs.push(RunRecord {
            point: rec[1].parse().map_err(|_| bad("bad point"))?,
            comparator: rec[2].parse()?,
            rep: rec[3].parse().map_err(|_| bad("bad rep"))?,
            seed: rec[4].parse().map_err(|_| bad("bad seed"))?,
            report: MetricReport {
                generated: rec[5].parse().map_err(|_| bad("bad generated"))?,
                delivered: rec[6].parse().map_err(|_| bad("bad delivered"))?,
                pfr: opt(&rec[7], line)?,
                net_throughput: opt(&rec[8], line)?.ok_or_else(|| bad("missing throughput"))?,
                aecr: opt(&rec[9], line)?,
                accuracy: opt(&rec[10], line)?,
                f_measure: opt(&rec[11], line)?,
            },
        });
    }
    Ok((variable, runs))
}

/// Reads a finished experiment directory. Every (point, comparator, rep)
/// named by the provenance header must be present.
pub fn read_experiment(dir: &Path) -> Result<ExperimentResult, HarnessError> {
    let path = dir.join(RUNS_FILE);
    if !path.exists() {
        return Err(HarnessError::Incomplete(vec![RUNS_FILE.to_string()]));
    }
    let text = fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
    let (meta, body) = split_header(&text);
    let (mut variable, mut runs) = parse_runs(&body)?;
    let field = |k: &str| {
        meta.get(k).cloned().ok_or_else(|| HarnessError::Parse {
            line: 1,
            message: format!("missing header {k}"),
        })
    };
    let points: Vec<f64> = field("points")?
        .split(',')
        .map(|p| {
            p.parse::<f64>().map_err(|_| HarnessError::Parse {
                line: 1,
                message: "bad points header".into(),
            })
        })
        .collect::<Result<_, _>>()?;
    let comparators: Vec<Comparator> = field("comparators")?
        .split(',')
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    let reps: usize = field("repetitions")?
        .parse()
        .map_err(|_| HarnessError::Parse {
            line: 1,
            message: "bad repetitions".into(),
        })?;
    let seeds = field("seeds")?;
    let (lo, hi) = seeds
        .split_once("..=")
        .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
        .ok_or_else(|| HarnessError::Parse {
            line: 1,
            message: "bad seeds header".into(),
        })?;
    if variable.is_empty() {
        variable = field("variable")?;
    }

    let present: BTreeSet<(u64, Comparator, usize)> = runs
        .iter()
        .map(|r| (r.point.to_bits(), r.comparator, r.rep))
        .collect();
    let mut missing = Vec::new();
    for &p in &points {
        for &c in &comparators {
            for r in 0..reps {
                if !present.contains(&(p.to_bits(), c, r)) {
                    missing.push(format!("{variable}={p} comparator={c} rep={r}"));
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(HarnessError::Incomplete(missing));
    }
    sort_runs(&mut runs);
    Ok(ExperimentResult {
        variable,
        config_hash: field("config_hash")?,
        seeds: (lo, hi),
        aggregates: aggregate(&runs),
        runs,
    })
}

// ----------------------------------------------------------------- verdicts

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Tolerance for ordering comparisons between means.
const EPS: f64 = 1e-12;

fn means(
    res: &ExperimentResult,
    c: Comparator,
    metric: fn(&AggregateRow) -> Summary,
) -> Option<Vec<(f64, f64)>> {
    let mut v: Vec<(f64, f64)> = res
        .aggregates
        .iter()
        .filter(|a| a.comparator == c)
        .map(|a| Some((a.point, metric(a).mean?)))
        .collect::<Option<_>>()?;
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    (!v.is_empty()).then_some(v)
}

fn fmt_series(v: &[(f64, f64)]) -> String {
    let s: Vec<String> = v.iter().map(|(p, m)| format!("{p}:{m:.4}")).collect();
    s.join(" ")
}

/// Trend and ordering verdicts. Checks whose comparators are absent are skipped.
pub fn verdicts(res: &ExperimentResult) -> Vec<Verdict> {
    use Comparator::*;
    let mut out = Vec::new();
    let pfr = |c| means(res, c, |a| a.pfr);
    let thr = |c| means(res, c, |a| a.net_throughput);
    let aecr = |c| means(res, c, |a| a.aecr);

    if let Some(a) = pfr(Aodv) {
        let pass = a.windows(2).all(|w| w[1].1 <= w[0].1 + EPS);
        out.push(Verdict {
            name: "pfr_aodv_non_increasing".into(),
            pass,
            detail: fmt_series(&a),
        });
    }
    if let (Some(t), Some(a)) = (pfr(AnfisTmm), pfr(Aodv)) {
        let pairs: Vec<(f64, f64, f64)> = t
            .iter()
            .zip(&a)
            .filter(|(x, y)| x.0 == y.0)
            .map(|(x, y)| (x.0, x.1, y.1))
            .collect();
        let ge = pairs
            .iter()
            .filter(|p| p.0 >= 0.2 - EPS)
            .all(|p| p.1 >= p.2 - EPS);
        let d: Vec<String> = pairs
            .iter()
            .map(|p| format!("{}:{:+.4}", p.0, p.1 - p.2))
            .collect();
        out.push(Verdict {
            name: "pfr_anfis_ge_aodv_from_0.2".into(),
            pass: ge,
            detail: d.join(" "),
        });
        if let Some(last) = pairs.last() {
            out.push(Verdict {
                name: "pfr_anfis_margin_at_max".into(),
                pass: last.1 - last.2 >= 0.05 - EPS,
                detail: format!(
                    "at {}: {:.4} - {:.4} = {:.4} (need >= 0.05)",
                    last.0,
                    last.1,
                    last.2,
                    last.1 - last.2
                ),
            });
        }
    }
    if let (Some(t), Some(f), Some(a)) = (thr(AnfisTmm), thr(FisTrust), thr(Aodv)) {
        let mut pass = true;
        let mut d = Vec::new();
        for ((x, y), z) in t.iter().zip(&f).zip(&a) {
            if x.0 >= 0.3 - EPS {
                pass &= x.1 >= y.1 - EPS && y.1 >= z.1 - EPS;
                d.push(format!("{}: {:.3} >= {:.3} >= {:.3}", x.0, x.1, y.1, z.1));
            }
        }
        out.push(Verdict {
            name: "throughput_anfis_ge_fis_ge_aodv_from_0.3".into(),
            pass,
            detail: d.join("; "),
        });
    }
    if let (Some(t), Some(f)) = (aecr(AnfisTmm), aecr(FisTrust)) {
        let pass = t.iter().zip(&f).all(|(x, y)| x.1 <= y.1 + EPS);
        let d: Vec<String> = t
            .iter()
            .zip(&f)
            .map(|(x, y)| format!("{}: {:.4} <= {:.4}", x.0, x.1, y.1))
            .collect();
        out.push(Verdict {
            name: "aecr_anfis_le_fis".into(),
            pass,
            detail: d.join("; "),
        });
    }
    out
}

/// Summary table of aggregate means, one line per (point, comparator).
pub fn summary_table(res: &ExperimentResult) -> String {
    let f = |s: Summary| {
        s.mean
            .map(|m| format!("{m:.4}"))
            .unwrap_or_else(|| "-".into())
    };
    let mut s = format!(
        "{:>8} {:>10} {:>5} {:>8} {:>9} {:>8} {:>8} {:>8}\n",
        res.variable.chars().take(8).collect::<String>(),
        "comparator",
        "runs",
        "pfr",
        "netT",
        "aecr",
        "acc",
        "f"
    );
    for a in &res.aggregates {
        s.push_str(&format!(
            "{:>8} {:>10} {:>5} {:>8} {:>9} {:>8} {:>8} {:>8}\n",
            a.point,
            a.comparator.as_str(),
            a.runs,
            f(a.pfr),
            f(a.net_throughput),
            f(a.aecr),
            f(a.accuracy),
            f(a.f_measure)
        ));
    }
    s
}

/// Reads a directory, then returns its summary table and verdicts.
pub fn report(dir: &Path) -> Result<(String, Vec<Verdict>), HarnessError> {
    let res = read_experiment(dir)?;
    Ok((summary_table(&res), verdicts(&res)))
}
