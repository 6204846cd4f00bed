// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment runner behind the `plme-lab` binary.
//!
//! A run resolves a [`ConfigFile`] into an [`ExperimentConfig`], computes the
//! scenario and writes `<scenario>_<hash>.csv` (plus any secondary tables as
//! `<scenario>_<hash>_<table>.csv`) and a JSON sidecar `<scenario>_<hash>.json`.
//! CSVs depend only on the configuration; the sidecar also records wall time.

mod config;
mod scenarios;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

use crate::error::{Error, Result};

pub use config::{list_scenarios, validate, ConfigFile, ExperimentConfig, Overrides, Scenario, ScenarioInfo, ValidationReport};
pub use scenarios::{
    cache_dir_for, config_hash, first_crossing, fixed_slope_prefactor, generator_grid, labelled_rates, negative_intervals,
    power_law_fit, run_scenario, EnsembleStore, EnsembleUse, ScenarioOutput, Table, ERROR_THRESHOLD, EXACT_NODES,
};

/// Process exit status for an error: 3 for numerical failures, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

/// Full-precision decimal: 17 significant digits round-trip every `f64`.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
    w.write_record(&table.columns).map_err(|e| Error::Io(e.into()))?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&x| format_value(x))).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

/// Files produced by [`run`].
#[derive(Clone, Debug)]
pub struct RunReport {
    pub hash: String,
    pub csv: Vec<PathBuf>,
    pub sidecar: PathBuf,
    pub output: ScenarioOutput,
}

/// Runs the scenario and writes its outputs under `cfg.output_dir`.
/// `cache_dir` defaults to [`cache_dir_for`] of the output directory.
pub fn run(cfg: &ExperimentConfig, cache_dir: Option<&Path>) -> Result<RunReport> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::Config(vec![format!("output_dir: cannot create {}: {e}", dir.display())]))?;
    let probe = dir.join(".plme-write-test");
    fs::write(&probe, b"").map_err(|e| Error::Config(vec![format!("output_dir: {} is not writable: {e}", dir.display())]))?;
    let _ = fs::remove_file(&probe);

    let store = EnsembleStore::new(Some(cache_dir.map(Path::to_path_buf).unwrap_or_else(|| cache_dir_for(dir))));
    let hash = config_hash(cfg);
    let stem = format!("{}_{hash}", cfg.scenario.name());
    let start = Instant::now();
    let output = run_scenario(cfg, &store)?;
    let wall = start.elapsed().as_secs_f64();

    let mut csv = Vec::new();
    for t in &output.tables {
        let name = if t.name.is_empty() { format!("{stem}.csv") } else { format!("{stem}_{}.csv", t.name) };
        let path = dir.join(name);
        write_csv(&path, t)?;
        csv.push(path);
    }
    let file_name = |p: &PathBuf| p.file_name().map(|n| n.to_string_lossy().into_owned());
    let sidecar = dir.join(format!("{stem}.json"));
    let doc = json!({
        "scenario": cfg.scenario.name(),
        "config_hash": hash,
        "config": cfg,
        "seed": cfg.seed,
        "versions": {
            "plme-lab": env!("CARGO_PKG_VERSION"),
            "cache_format": "PLMEMAP1",
        },
        "wall_time_s": wall,
        "outputs": csv.iter().map(file_name).collect::<Vec<_>>(),
        "tables": output.tables.iter().map(|t| json!({ "name": t.name, "columns": t.columns, "rows": t.rows.len() })).collect::<Vec<_>>(),
        "ensembles": output.ensembles,
        "summary": output.summary,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.into()))?;
    fs::write(&sidecar, text + "\n")?;
    Ok(RunReport { hash, csv, sidecar, output })
}
