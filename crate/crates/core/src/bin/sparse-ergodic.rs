use clap::Parser;
use sparse_ergodic::experiment::{render, run_experiment, write_files, Command, ExperimentConfig, ReportRow};
use std::path::PathBuf;
use std::process::ExitCode;

/// Sparse averaging families: finite checks, sweeps and plot data.
#[derive(Parser, Debug)]
#[command(name = "sparse-ergodic", version)]
struct Cli {
    /// JSON experiment config; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global seed (beats SPARSE_ERGODIC_SEED, which beats the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for report.json, report.csv, series/ and manifest.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Budget on dense cells per correlation or window.
    #[arg(long, global = true)]
    max_cells: Option<u128>,
    /// Tolerance for floating-point identities.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Option<Command>,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(2)
}

fn line(row: &ReportRow) -> String {
    match (row.op.starts_with("acceptance."), row.metrics.get("summary").and_then(|s| s.as_str())) {
        (true, Some(summary)) => format!(
            "[{}] {} {}: {summary}",
            if row.pass == Some(true) { "PASS" } else { "FAIL" },
            &row.op["acceptance.".len()..],
            row.params["name"].as_str().unwrap_or("")
        ),
        _ => serde_json::to_string(row).unwrap_or_default(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match ExperimentConfig::from_json(&text) {
                Ok(c) => c,
                Err(e) => return usage(e),
            },
            Err(e) => return usage(format!("cannot read {}: {e}", path.display())),
        },
        None => ExperimentConfig::default(),
    };
    if let Err(e) = cfg.apply_seed_env() {
        return usage(e);
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(c) = cli.command {
        cfg.commands = vec![c];
    }
    if let Some(o) = cli.out {
        cfg.out_dir = Some(o);
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    if let Some(m) = cli.max_cells {
        cfg.budgets.max_cells = m;
    }
    if let Some(t) = cli.tolerance {
        cfg.tolerance = t;
    }
    if let Err(e) = cfg.validate() {
        return usage(e);
    }
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for row in &report.rows {
        println!("{}", line(row));
    }
    if let Some(dir) = &cfg.out_dir {
        let written = render(&cfg, &report).and_then(|files| write_files(dir, &files));
        if let Err(e) = written {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
