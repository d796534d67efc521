//! Experiment configuration, orchestration and report emission.
//!
//! A run takes an [`ExperimentConfig`], executes each command through the
//! module it names, and renders a deterministic set of files: `report.json`
//! (scalar summaries), `report.csv` (the same rows flattened), one CSV per
//! series under `series/`, and `manifest.json` with the config hash, version
//! and seed. No wall-clock data is recorded anywhere.

mod command;
mod ops;

pub use command::*;

use crate::acceptance;
use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub const SEED_ENV: &str = "SPARSE_ERGODIC_SEED";
pub const DEFAULT_SEED: u64 = 1;
pub const REPORT_SCHEMA: u32 = 1;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_jobs() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Cap on dense cells scanned by a single correlation or window.
    #[serde(default = "Budgets::default_cells")]
    pub max_cells: u128,
}

impl Budgets {
    fn default_cells() -> u128 {
        1 << 28
    }
}

impl Default for Budgets {
    fn default() -> Self {
        Self { max_cells: Self::default_cells() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads for independent commands and criteria.
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Tolerance for floating-point identities with a declared threshold.
    #[serde(default = "ExperimentConfig::default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub commands: Vec<Command>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            out_dir: None,
            jobs: 1,
            tolerance: Self::default_tolerance(),
            budgets: Budgets::default(),
            commands: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    fn default_tolerance() -> f64 {
        1e-9
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("config does not match the schema: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.commands.is_empty() {
            return Err(invalid("the config names no commands"));
        }
        if self.jobs == 0 {
            return Err(invalid("jobs must be at least 1"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(invalid("tolerance must be nonnegative"));
        }
        Ok(())
    }

    /// Applies `SPARSE_ERGODIC_SEED` if it is set.
    pub fn apply_seed_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed =
                v.trim().parse().map_err(|_| invalid(format!("{SEED_ENV} must be an unsigned integer, got {v:?}")))?;
        }
        Ok(())
    }

    /// The parts of the config that determine the outputs (`out_dir` and
    /// `jobs` do not).
    pub fn canonical(&self) -> Value {
        json!({
            "seed": self.seed,
            "tolerance": self.tolerance,
            "budgets": self.budgets,
            "commands": self.commands,
        })
    }

    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.canonical().to_string().as_bytes()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub op: String,
    pub params: Value,
    pub metrics: Value,
    /// Present only when the op declares a threshold.
    pub pass: Option<bool>,
}

/// An `(x, y, …)` table for plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Series {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub series: Vec<Series>,
}

impl Report {
    /// `true` unless some row failed its declared threshold.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass != Some(false))
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    fn extend(&mut self, o: Report) {
        self.rows.extend(o.rows);
        self.series.extend(o.series);
    }
}

/// Shared run settings handed to every op.
#[derive(Clone, Debug)]
pub struct Context {
    pub seed: u64,
    pub tolerance: f64,
    pub budgets: Budgets,
    pub jobs: usize,
}

/// `f(0..n)` on up to `jobs` threads, results in index order.
pub fn run_indexed<T: Send>(n: usize, jobs: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = jobs.clamp(1, n.max(1));
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let v = f(i);
                slots.lock().expect("worker panicked")[i] = Some(v);
            });
        }
    });
    slots.into_inner().expect("worker panicked").into_iter().map(|v| v.expect("every index ran")).collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let ctx = Context { seed: cfg.seed, tolerance: cfg.tolerance, budgets: cfg.budgets.clone(), jobs: cfg.jobs };
    // a single command gets the workers for itself (acceptance criteria run in parallel)
    let outer = if cfg.commands.len() == 1 { 1 } else { cfg.jobs };
    let inner = Context { jobs: if outer == 1 { cfg.jobs } else { 1 }, ..ctx };
    let results = run_indexed(cfg.commands.len(), outer, |i| run_command(&cfg.commands[i], &inner));
    let mut report = Report::default();
    for (i, r) in results.into_iter().enumerate() {
        let mut r = r?;
        for s in &mut r.series {
            s.name = format!("{:02}-{}", i + 1, s.name);
        }
        report.extend(r);
    }
    Ok(report)
}

pub fn run_command(cmd: &Command, ctx: &Context) -> Result<Report> {
    match cmd {
        Command::Blocks(op) => ops::blocks(op),
        Command::Random(a) => ops::random(a, ctx),
        Command::Arith(op) => ops::arith(op, ctx),
        Command::Group(op) => ops::group(op, ctx),
        Command::Dyn(op) => ops::dynamics(op, ctx),
        Command::AllAcceptance(a) => all_acceptance(a, ctx),
    }
}

fn criterion_row(c: &acceptance::Criterion) -> ReportRow {
    ReportRow {
        op: format!("acceptance.{:02}", c.id),
        params: json!({"id": c.id, "name": c.name}),
        metrics: json!({"summary": c.summary, "detail": c.metrics}),
        pass: Some(c.pass),
    }
}

fn acceptance_rows(ids: &[u8], ctx: &Context) -> Result<Vec<ReportRow>> {
    run_indexed(ids.len(), ctx.jobs, |i| acceptance::run_criterion(ids[i], ctx.seed))
        .into_iter()
        .map(|c| c.map(|c| criterion_row(&c)))
        .collect()
}

/// Criteria 1..14 as report rows; criterion 15 runs the selected criteria a
/// second time and compares the rendered bytes.
fn all_acceptance(a: &AcceptanceArgs, ctx: &Context) -> Result<Report> {
    let wanted: Vec<u8> = if a.only.is_empty() { (1..=acceptance::CRITERIA).collect() } else { a.only.clone() };
    if let Some(bad) = wanted.iter().find(|&&id| !(1..=acceptance::CRITERIA).contains(&id)) {
        return Err(invalid(format!("no acceptance criterion {bad}")));
    }
    let ids: Vec<u8> = wanted.iter().copied().filter(|&id| id < acceptance::CRITERIA).collect();
    let first = Report { rows: acceptance_rows(&ids, ctx)?, series: Vec::new() };
    let mut report = first.clone();
    if wanted.contains(&acceptance::CRITERIA) {
        let second = Report { rows: acceptance_rows(&ids, ctx)?, series: Vec::new() };
        let (x, y) = (render_body(&first)?, render_body(&second)?);
        let identical = x == y;
        let c = acceptance::Criterion {
            id: acceptance::CRITERIA,
            name: acceptance::name(acceptance::CRITERIA),
            pass: identical,
            summary: format!(
                "criteria {:?} run twice with seed {}: {} files, byte-identical: {identical}",
                ids,
                ctx.seed,
                x.len()
            ),
            metrics: json!({"files": x.iter().map(|f| &f.path).collect::<Vec<_>>(),
                            "sha256": x.iter().map(|f| hex(&Sha256::digest(&f.bytes))).collect::<Vec<_>>()}),
        };
        report.rows.push(criterion_row(&c));
    }
    Ok(report)
}

/// One output file, relative to the output directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderedFile {
    pub path: String,
    pub bytes: Vec<u8>,
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Everything except the manifest.
fn render_body(report: &Report) -> Result<Vec<RenderedFile>> {
    let json_rows = serde_json::to_vec_pretty(&json!({"schema": REPORT_SCHEMA, "rows": report.rows}))?;
    let flat: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.op.clone(),
                r.params.to_string(),
                r.metrics.to_string(),
                r.pass.map_or(String::new(), |p| p.to_string()),
            ]
        })
        .collect();
    let header: Vec<String> = ["op", "params", "metrics", "pass"].iter().map(|s| s.to_string()).collect();
    let mut files = vec![
        RenderedFile { path: "report.json".into(), bytes: json_rows },
        RenderedFile { path: "report.csv".into(), bytes: csv_bytes(&header, &flat)? },
    ];
    for s in &report.series {
        files.push(RenderedFile { path: format!("series/{}.csv", s.name), bytes: csv_bytes(&s.columns, &s.rows)? });
    }
    Ok(files)
}

/// Report files plus `manifest.json`, in a fixed order.
pub fn render(cfg: &ExperimentConfig, report: &Report) -> Result<Vec<RenderedFile>> {
    let mut files = render_body(report)?;
    let listing: Vec<Value> =
        files.iter().map(|f| json!({"path": f.path, "sha256": hex(&Sha256::digest(&f.bytes))})).collect();
    let manifest = json!({
        "crate": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "report_schema": REPORT_SCHEMA,
        "seed": cfg.seed,
        "config_hash": cfg.hash(),
        "config": cfg.canonical(),
        "passed": report.passed(),
        "files": listing,
    });
    files.push(RenderedFile { path: "manifest.json".into(), bytes: serde_json::to_vec_pretty(&manifest)? });
    Ok(files)
}

pub fn write_files(dir: &Path, files: &[RenderedFile]) -> Result<()> {
    for f in files {
        let path = dir.join(&f.path);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, &f.bytes)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_refused() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert!(matches!(run_experiment(&cfg), Err(Error::InvalidParameter(_))));
        assert!(ExperimentConfig::from_json(r#"{"sed": 3}"#).is_err());
    }

    #[test]
    fn json_commands_fill_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"seed": 5, "commands": [{"module": "arith", "op": "weil", "p": 11},
                                         {"module": "random", "family": "speckled", "action": "enumerate", "count": 10}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.commands[0], Command::Arith(ArithOp::Weil(WeilArgs { p: 11, m: 2 })));
        let back = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.commands[1].op_name(), "random.speckled.enumerate");
    }

    #[test]
    fn hash_ignores_jobs_and_out_dir() {
        let mut a = ExperimentConfig::default();
        a.commands.push(Command::Blocks(BlocksOp::CountEn(CountArgs { n: 4 })));
        let mut b = a.clone();
        b.jobs = 3;
        b.out_dir = Some("x".into());
        assert_eq!(a.hash(), b.hash());
        b.seed = 2;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn indexed_runs_keep_order() {
        assert_eq!(run_indexed(7, 3, |i| i * i), vec![0, 1, 4, 9, 16, 25, 36]);
    }
}
