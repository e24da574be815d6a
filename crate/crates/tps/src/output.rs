//! CSV tables and their JSON metadata sidecars.
//!
//! CSV contents depend only on the resolved configuration. Timing and
//! thread counts go to the sidecar, which is the only place they appear.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use tps_core::dynamics::{Aggregates, ExperimentRecord, RecordConfig, ScalingRow};

use crate::config::CliConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Timing context of one CLI run.
#[derive(Debug, Clone)]
pub struct RunMeta {
    started: Instant,
    started_unix: f64,
    pub threads: usize,
}

impl RunMeta {
    pub fn start(threads: usize) -> Self {
        let started_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        Self {
            started: Instant::now(),
            started_unix,
            threads,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Sidecar<'a> {
    pub file: String,
    pub version: &'static str,
    pub seed: u64,
    pub columns: Vec<String>,
    pub started_unix_seconds: f64,
    pub wall_clock_seconds: f64,
    pub threads: usize,
    pub cli: &'a CliConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record: Option<&'a RecordConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregates: Option<&'a Aggregates>,
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn write_sidecar(csv: &Path, columns: &[String], cli: &CliConfig, meta: &RunMeta, record: Option<&ExperimentRecord>) -> Result<(), CliError> {
    let s = Sidecar {
        file: csv
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        version: VERSION,
        seed: cli.seed,
        columns: columns.to_vec(),
        started_unix_seconds: meta.started_unix,
        wall_clock_seconds: meta.started.elapsed().as_secs_f64(),
        threads: meta.threads,
        cli,
        record: record.map(|r| &r.config),
        aggregates: record.map(|r| &r.aggregates),
    };
    let text = serde_json::to_string_pretty(&s)?;
    std::fs::write(sidecar_path(csv), text + "\n")?;
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

/// `<label>.csv` with columns `t` and every series, plus its sidecar.
pub fn write_record(dir: &Path, rec: &ExperimentRecord, cli: &CliConfig, meta: &RunMeta) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(format!("{}.csv", rec.label));
    let mut columns = vec!["t".to_string()];
    columns.extend(rec.series.iter().map(|s| s.name.clone()));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(&columns)?;
    for (k, t) in rec.times.iter().enumerate() {
        let mut row = vec![fmt_f64(*t)];
        row.extend(rec.series.iter().map(|s| fmt_f64(s.values[k])));
        w.write_record(&row)?;
    }
    w.flush()?;
    write_sidecar(&path, &columns, cli, meta, Some(rec))?;
    Ok(path)
}

pub const SCALING_COLUMNS: [&str; 11] = [
    "model",
    "n",
    "dim",
    "realizations",
    "phi_mean",
    "phi_stderr",
    "typical",
    "deviation",
    "log_deviation",
    "converged",
    "leakage",
];

pub fn write_scaling(dir: &Path, name: &str, rows: &[ScalingRow], cli: &CliConfig, meta: &RunMeta) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(format!("{name}.csv"));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(SCALING_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.model.clone(),
            r.n.to_string(),
            r.dim.to_string(),
            r.realizations.to_string(),
            fmt_f64(r.phi_mean),
            fmt_f64(r.phi_stderr),
            fmt_f64(r.typical),
            fmt_f64(r.deviation),
            fmt_f64(r.log_deviation),
            r.converged.to_string(),
            r.leakage.map(fmt_f64).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    let columns: Vec<String> = SCALING_COLUMNS.iter().map(|s| s.to_string()).collect();
    write_sidecar(&path, &columns, cli, meta, None)?;
    Ok(path)
}

/// One-row table `unitary,dims,route,phi` for a named unitary.
pub fn write_unitary(
    dir: &Path,
    name: &str,
    dims: &[usize],
    route: &str,
    phi: f64,
    cli: &CliConfig,
    meta: &RunMeta,
) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(format!("phi-{name}.csv"));
    let columns = ["unitary", "dims", "route", "phi"];
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(columns)?;
    let dims: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    w.write_record([name.to_string(), dims.join("x"), route.to_string(), fmt_f64(phi)])?;
    w.flush()?;
    let columns: Vec<String> = columns.iter().map(|s| s.to_string()).collect();
    write_sidecar(&path, &columns, cli, meta, None)?;
    Ok(path)
}
