//! `regmn-sweep`: run a reference simulation and a sweep over the
//! regularization parameter, then print the convergence table.
//!
//! Exit status: 0 when every run succeeded, 2 when at least one regularized
//! run failed, 1 on any other error (including a failed reference run).

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use config::Settings;
use regmn::sweep::{emit_table, run_sweep, SweepOptions, SweepOutcome, TableFormat};

#[derive(Debug, Parser)]
#[command(name = "regmn-sweep", version, about = "Regularized entropy-closure convergence sweeps")]
pub struct Cli {
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Kinetic entropy: mb, be or burg.
    #[arg(long)]
    pub entropy: Option<String>,
    /// Highest moment order.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Amplitude of the initial anisotropy.
    #[arg(long = "M0")]
    pub m0: Option<f64>,
    #[arg(long)]
    pub sigma_s: Option<f64>,
    /// Comma-separated, strictly decreasing; `1e-9.25` means 10^-9.25.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_list: Option<String>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub dg_degree: Option<usize>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub final_time: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub tau_desired: Option<f64>,
    #[arg(long)]
    pub ell_max: Option<usize>,
    #[arg(long)]
    pub quad_order: Option<usize>,
    /// Output directory for the table, results.json and checkpoints.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or markdown.
    #[arg(long)]
    pub format: Option<String>,
    /// Concurrent regularized runs (0: one per core).
    #[arg(long)]
    pub workers: Option<usize>,
    /// regularized or original.
    #[arg(long)]
    pub source_form: Option<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let settings = Settings::resolve(&cli)?;
    let format: TableFormat = settings.format.parse()?;
    let opts = SweepOptions {
        workers: settings.workers,
        checkpoint_dir: settings.out.as_ref().map(|d| d.join("checkpoints")),
    };
    let outcome = run_sweep(&settings.run, &settings.gammas, &opts)?;
    let table = emit_table(&outcome.records, format);
    if let Some(dir) = &settings.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let name = match format {
            TableFormat::Csv => "table.csv",
            TableFormat::Markdown => "table.md",
        };
        std::fs::write(dir.join(name), &table)?;
        outcome.write_json(&dir.join("results.json"))?;
    }
    print!("{table}");
    for r in outcome.records.iter().filter(|r| r.failed) {
        eprintln!(
            "gamma={} failed: {}",
            r.gamma,
            r.error.as_deref().unwrap_or("unknown error")
        );
    }
    Ok(ExitCode::from(exit_status(&outcome)))
}

fn exit_status(outcome: &SweepOutcome) -> u8 {
    if outcome.any_failed() {
        2
    } else {
        0
    }
}
