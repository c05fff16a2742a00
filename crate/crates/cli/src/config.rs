//! Merges defaults, an optional key-value file and command-line flags.
//!
//! File syntax: one `key = value` per line, `#` starts a comment. Keys are
//! the long flag names without dashes (`sigma-s` and `sigma_s` both work).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

use regmn::sweep::parse_gamma_list;
use regmn::transport::RunConfig;

use crate::Cli;

pub const DEFAULT_GAMMAS: &str = "1e-3,1e-4,1e-5,1e-6,1e-7,1e-8";

const KEYS: &[&str] = &[
    "entropy",
    "n",
    "m0",
    "sigma_s",
    "gamma_list",
    "cells",
    "dg_degree",
    "cfl",
    "final_time",
    "tau",
    "tau_desired",
    "ell_max",
    "quad_order",
    "out",
    "format",
    "workers",
    "source_form",
];

#[derive(Debug, Clone)]
pub struct Settings {
    pub run: RunConfig,
    pub gammas: Vec<f64>,
    pub out: Option<PathBuf>,
    pub format: String,
    pub workers: usize,
}

fn normalize(key: &str) -> String {
    key.trim().trim_start_matches('-').replace('-', "_").to_ascii_lowercase()
}

pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key = value, got '{raw}'", i + 1))?;
        let key = normalize(k);
        if !KEYS.contains(&key.as_str()) {
            bail!("line {}: unknown key '{}'", i + 1, k.trim());
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn cli_values(cli: &Cli) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    let mut put = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    };
    put("entropy", cli.entropy.clone());
    put("n", cli.n.map(|v| v.to_string()));
    put("m0", cli.m0.map(|v| v.to_string()));
    put("sigma_s", cli.sigma_s.map(|v| v.to_string()));
    put("gamma_list", cli.gamma_list.clone());
    put("cells", cli.cells.map(|v| v.to_string()));
    put("dg_degree", cli.dg_degree.map(|v| v.to_string()));
    put("cfl", cli.cfl.map(|v| v.to_string()));
    put("final_time", cli.final_time.map(|v| v.to_string()));
    put("tau", cli.tau.map(|v| v.to_string()));
    put("tau_desired", cli.tau_desired.map(|v| v.to_string()));
    put("ell_max", cli.ell_max.map(|v| v.to_string()));
    put("quad_order", cli.quad_order.map(|v| v.to_string()));
    put("out", cli.out.as_ref().map(|p| p.display().to_string()));
    put("format", cli.format.clone());
    put("workers", cli.workers.map(|v| v.to_string()));
    put("source_form", cli.source_form.clone());
    map
}

fn get<T: FromStr>(map: &BTreeMap<String, String>, key: &str, slot: &mut T) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = map.get(key) {
        *slot = v
            .parse()
            .map_err(|e| anyhow!("invalid value '{v}' for {key}: {e}"))?;
    }
    Ok(())
}

impl Settings {
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let mut values = match &cli.config {
            Some(path) => load(path)?,
            None => BTreeMap::new(),
        };
        values.extend(cli_values(cli));
        Self::from_values(&values)
    }

    pub fn from_values(values: &BTreeMap<String, String>) -> Result<Self> {
        let mut run = RunConfig::default();
        get(values, "entropy", &mut run.entropy)?;
        get(values, "n", &mut run.n)?;
        get(values, "m0", &mut run.m0)?;
        get(values, "sigma_s", &mut run.sigma_s)?;
        get(values, "cells", &mut run.n_cells)?;
        get(values, "dg_degree", &mut run.dg_degree)?;
        get(values, "cfl", &mut run.cfl)?;
        get(values, "final_time", &mut run.final_time)?;
        get(values, "tau", &mut run.solver.tau)?;
        get(values, "tau_desired", &mut run.solver.tau_desired)?;
        get(values, "ell_max", &mut run.solver.ell_max)?;
        get(values, "source_form", &mut run.source_form)?;
        if let Some(q) = values.get("quad_order") {
            run.quad_order = Some(q.parse().map_err(|e| anyhow!("invalid quad_order '{q}': {e}"))?);
        }
        run.validate()?;

        let gammas = parse_gamma_list(values.get("gamma_list").map_or(DEFAULT_GAMMAS, String::as_str))?;
        let mut format = "csv".to_string();
        get(values, "format", &mut format)?;
        let mut workers = 0usize;
        get(values, "workers", &mut workers)?;
        Ok(Self {
            run,
            gammas,
            out: values.get("out").map(PathBuf::from),
            format,
            workers,
        })
    }
}

fn load(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_file(&text).with_context(|| format!("in {}", path.display()))
}
