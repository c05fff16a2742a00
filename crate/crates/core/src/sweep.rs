//! Regularization-parameter sweeps: one reference run at `gamma = 0`, one
//! regularized run per `gamma`, error metrics against the reference, and
//! observed orders between consecutive `gamma` values.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transport::dg::SolveStats;
use crate::transport::grid::GridState;
use crate::transport::metrics::{error_metrics, observed_order, ErrorMetrics};
use crate::closure::ClosureContext;
use crate::transport::run::{run_simulation, RunConfig, RunOutput};

pub const CSV_HEADER: &str = "gamma,H_gamma,nu_H,L2,nu_L2,Linf,nu_Linf";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub gamma: f64,
    pub h_gamma: Option<f64>,
    pub nu_h: Option<f64>,
    pub l2: Option<f64>,
    pub nu_l2: Option<f64>,
    pub linf: Option<f64>,
    pub nu_linf: Option<f64>,
    pub failed: bool,
    /// Failure diagnostic of this run, if any.
    pub error: Option<String>,
    pub stats: Option<SolveStats>,
}

impl SweepRecord {
    /// A successful row without orders (filled in by [`assign_orders`]).
    pub fn from_metrics(gamma: f64, m: ErrorMetrics) -> Self {
        Self {
            gamma,
            h_gamma: Some(m.h_gamma),
            nu_h: None,
            l2: Some(m.l2),
            nu_l2: None,
            linf: Some(m.linf),
            nu_linf: None,
            failed: false,
            error: None,
            stats: None,
        }
    }

    fn failed(gamma: f64, err: &Error) -> Self {
        Self {
            gamma,
            h_gamma: None,
            nu_h: None,
            l2: None,
            nu_l2: None,
            linf: None,
            nu_linf: None,
            failed: true,
            error: Some(err.to_string()),
            stats: None,
        }
    }
}

/// Fills the `nu_*` fields of rows `1..` from each row and its predecessor.
pub fn assign_orders(records: &mut [SweepRecord]) -> Result<()> {
    fn pair(a: Option<f64>, b: Option<f64>, ga: f64, gb: f64) -> Result<Option<f64>> {
        match (a, b) {
            (Some(a), Some(b)) => Ok(observed_order(&[(ga, a), (gb, b)])?[0]),
            _ => Ok(None),
        }
    }
    for i in 1..records.len() {
        let (prev, cur) = (records[i - 1].clone(), &mut records[i]);
        cur.nu_h = pair(prev.h_gamma, cur.h_gamma, prev.gamma, cur.gamma)?;
        cur.nu_l2 = pair(prev.l2, cur.l2, prev.gamma, cur.gamma)?;
        cur.nu_linf = pair(prev.linf, cur.linf, prev.gamma, cur.gamma)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Concurrent runs; 0 uses the rayon default.
    pub workers: usize,
    /// Where to write one checkpoint per run.
    pub checkpoint_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub config: RunConfig,
    pub reference_stats: SolveStats,
    pub records: Vec<SweepRecord>,
}

impl SweepOutcome {
    pub fn any_failed(&self) -> bool {
        self.records.iter().any(|r| r.failed)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

pub fn validate_gammas(gammas: &[f64]) -> Result<()> {
    if gammas.is_empty() {
        return Err(Error::InvalidArgument("empty gamma list".into()));
    }
    if let Some(g) = gammas.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
        return Err(Error::InvalidArgument(format!("gamma values must be positive, got {g}")));
    }
    if let Some(w) = gammas.windows(2).find(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument(format!(
            "gamma list must be strictly decreasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Runs the reference once and every `gamma` once. A failing reference run
/// is an error; a failing regularized run is flagged in its record.
pub fn run_sweep(cfg: &RunConfig, gammas: &[f64], opts: &SweepOptions) -> Result<SweepOutcome> {
    run_sweep_with(cfg, gammas, opts, run_simulation)
}

/// [`run_sweep`] with a custom simulation driver.
pub fn run_sweep_with<F>(cfg: &RunConfig, gammas: &[f64], opts: &SweepOptions, simulate: F) -> Result<SweepOutcome>
where
    F: Fn(&ClosureContext, &RunConfig) -> Result<RunOutput> + Sync,
{
    validate_gammas(gammas)?;
    let base = cfg.with_gamma(0.0);
    base.validate()?;
    let ctx = base.context()?;
    if let Some(dir) = &opts.checkpoint_dir {
        std::fs::create_dir_all(dir)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build worker pool: {e}")))?;

    pool.install(|| {
        log::info!("reference run");
        let reference =
            simulate(&ctx, &base).map_err(|e| e.at("reference run (gamma=0)".to_string()))?;
        save_checkpoint(opts, &reference.state, 0.0)?;

        let mut records: Vec<SweepRecord> = gammas
            .par_iter()
            .map(|&gamma| {
                log::info!("run gamma={}", format_gamma(gamma));
                let result = simulate(&ctx, &base.with_gamma(gamma)).and_then(|out| {
                    save_checkpoint(opts, &out.state, gamma)?;
                    let m = error_metrics(&ctx, &out.state, &reference.state, gamma)?;
                    Ok((m, out.stats))
                });
                match result {
                    Ok((m, stats)) => SweepRecord {
                        stats: Some(stats),
                        ..SweepRecord::from_metrics(gamma, m)
                    },
                    Err(e) => {
                        log::warn!("gamma={}: {e}", format_gamma(gamma));
                        SweepRecord::failed(gamma, &e)
                    }
                }
            })
            .collect();
        assign_orders(&mut records)?;
        Ok(SweepOutcome {
            config: base,
            reference_stats: reference.stats,
            records,
        })
    })
}

fn save_checkpoint(opts: &SweepOptions, state: &GridState, gamma: f64) -> Result<()> {
    let Some(dir) = &opts.checkpoint_dir else {
        return Ok(());
    };
    let name = if gamma == 0.0 {
        "reference.csv".to_string()
    } else {
        format!("gamma_{}.csv", format_gamma(gamma))
    };
    state.write_checkpoint(&dir.join(name), &[("gamma", format_gamma(gamma))])
}

/// Parses a `gamma` value; besides ordinary reals, accepts a fractional
/// decimal exponent such as `1e-9.25` (meaning `10^-9.25`).
pub fn parse_gamma(text: &str) -> Result<f64> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let bad = || Error::InvalidArgument(format!("cannot parse gamma '{text}'"));
    let (mant, exp) = t.split_once(['e', 'E']).ok_or_else(bad)?;
    let mant: f64 = mant.parse().map_err(|_| bad())?;
    let exp: f64 = exp.parse().map_err(|_| bad())?;
    if !exp.is_finite() {
        return Err(bad());
    }
    Ok(mant * 10f64.powf(exp))
}

pub fn parse_gamma_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_gamma)
        .collect()
}

/// `{:e}` output with the exponent padded to at least two digits, e.g.
/// `5.454e-11`, `2.123e-05`.
fn pad_exponent(s: &str) -> String {
    match s.split_once('e') {
        Some((m, e)) => {
            let (sign, digits) = match e.strip_prefix('-') {
                Some(d) => ("-", d),
                None => ("+", e),
            };
            format!("{m}e{sign}{digits:0>2}")
        }
        None => s.to_string(),
    }
}

/// Four significant digits in scientific notation.
pub fn format_sci(x: f64) -> String {
    pad_exponent(&format!("{x:.3e}"))
}

/// Shortest round-trip representation of `gamma`, e.g. `1e-06`.
pub fn format_gamma(gamma: f64) -> String {
    pad_exponent(&format!("{gamma:e}"))
}

fn format_order(nu: Option<f64>) -> Option<String> {
    nu.map(|v| format!("{v:.2}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => Err(Error::InvalidArgument(format!("unknown table format '{other}'"))),
        }
    }
}

pub fn emit_table(records: &[SweepRecord], format: TableFormat) -> String {
    let cells = |r: &SweepRecord| -> [Option<String>; 6] {
        [
            r.h_gamma.map(format_sci),
            format_order(r.nu_h),
            r.l2.map(format_sci),
            format_order(r.nu_l2),
            r.linf.map(format_sci),
            format_order(r.nu_linf),
        ]
    };
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in records {
                let fields: Vec<String> = cells(r).into_iter().map(Option::unwrap_or_default).collect();
                let _ = writeln!(out, "{},{}", format_gamma(r.gamma), fields.join(","));
            }
        }
        TableFormat::Markdown => {
            out.push_str("| γ | H_γ | ν | L² | ν | L∞ | ν |\n");
            out.push_str("|---|---|---|---|---|---|---|\n");
            for r in records {
                let gamma = format_sci(r.gamma);
                let fields: Vec<String> = if r.failed {
                    vec!["failed".to_string(); 6]
                } else {
                    cells(r)
                        .into_iter()
                        .map(|c| c.unwrap_or_else(|| "--".to_string()))
                        .collect()
                };
                let _ = writeln!(out, "| {gamma} | {} |", fields.join(" | "));
            }
        }
    }
    out
}
