//! Execution of a resolved [`CliConfig`].

use std::io::Write;
use std::path::PathBuf;

use tps_core::dynamics::{fig1_pipeline, fig2_pipeline, fig3_pipeline, phi_time_series_with};
use tps_core::geometry::{self, phi_correlator, phi_man, phi_projection, two_unitary_example};
use tps_core::linalg::permutation_operator;
use tps_core::models::Family;
use tps_core::randomness::{haar_unitary, typical_phi, typical_phi_qubit, SeededGenerator};
use tps_core::{AlgebraSet, DenseOperator, TensorFactorization};

use crate::config::{CliConfig, FiguresTask, PhiTask, RouteChoice, Task, TypicalTask, UnitaryKind, VerifyTask};
use crate::error::CliError;
use crate::exec::Pool;
use crate::output::{write_record, write_scaling, write_unitary, RunMeta};
use crate::verify::run_identity;

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Runs a command, printing a short report to `out`. Returns the CSV files written.
pub fn execute(cfg: &CliConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let pool = Pool::new(cfg.threads).map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let meta = RunMeta::start(pool.threads());
    match &cfg.task {
        Task::Phi(t) => run_phi(cfg, t, &pool, &meta, out),
        Task::Verify(t) => run_verify(cfg, t, out).map(|()| Vec::new()),
        Task::Figures(t) => run_figures(cfg, t, &pool, &meta, out),
        Task::Typical(t) => run_typical(t, out).map(|()| Vec::new()),
    }
}

pub fn named_unitary(kind: UnitaryKind, dims: &[usize], seed: u64) -> Result<DenseOperator, CliError> {
    let tf = TensorFactorization::new(dims)?;
    let d = tf.dim();
    let u = match kind {
        UnitaryKind::Identity => DenseOperator::identity(d),
        UnitaryKind::Swap => {
            if dims.len() != 2 || dims[0] != dims[1] {
                return Err(CliError::Usage("swap needs two equal local dimensions".into()));
            }
            permutation_operator(&[1, 0], dims)?
        }
        UnitaryKind::Cnot => {
            if dims != [2, 2] {
                return Err(CliError::Usage("cnot acts on --dims 2,2".into()));
            }
            #[rustfmt::skip]
            let rows = [
                1.0, 0.0, 0.0, 0.0,
                0.0, 1.0, 0.0, 0.0,
                0.0, 0.0, 0.0, 1.0,
                0.0, 0.0, 1.0, 0.0,
            ];
            DenseOperator::from_real_rows(4, &rows)?.into_unitary()?
        }
        UnitaryKind::TwoUnitary => {
            if dims.len() != 2 || dims[0] != dims[1] {
                return Err(CliError::Usage("two-unitary needs --q or two equal dimensions".into()));
            }
            two_unitary_example(dims[0])?
        }
        UnitaryKind::Haar => haar_unitary(d, &mut SeededGenerator::new(seed)),
    };
    Ok(u)
}

fn run_phi(cfg: &CliConfig, t: &PhiTask, pool: &Pool, meta: &RunMeta, out: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    match t {
        PhiTask::Model {
            model,
            clusters,
            realization,
            times,
        } => {
            let model = model.clone().with_seed(cfg.seed);
            let built = model.build(*realization)?;
            let q = match model.family {
                Family::Tfim => 2usize,
                _ => 3,
            };
            let cluster_dim = q.pow((model.n / clusters) as u32);
            let aset = AlgebraSet::full(&vec![cluster_dim; *clusters])?;
            let mut rec = phi_time_series_with(pool, &built, &aset, times)?;
            rec.label = format!("phi-{}-N{}", model.label(), model.n);
            rec.config.model = Some(model);
            let path = write_record(&cfg.out_dir, &rec, cfg, meta)?;
            let phi = rec.column("phi").unwrap_or_default();
            let max = phi.iter().copied().fold(0.0, f64::max);
            writeln!(out, "wrote {} ({} rows, max phi {max:.6})", path.display(), phi.len()).map_err(io)?;
            if let Some(l) = built.leakage {
                writeln!(out, "projection leakage {l:.6}").map_err(io)?;
            }
            Ok(vec![path])
        }
        PhiTask::Unitary { unitary, dims, route } => {
            let u = named_unitary(*unitary, dims, cfg.seed)?;
            let aset = AlgebraSet::full(dims)?;
            let res = match route {
                RouteChoice::Auto => geometry::phi(&aset, &u)?,
                RouteChoice::Man => phi_man(&aset, &u)?,
                RouteChoice::Correlator => phi_correlator(&aset, &u)?,
                RouteChoice::Projection => phi_projection(&aset, &u)?,
            };
            let route_name = serde_json::to_value(res.route)?
                .as_str()
                .unwrap_or("unknown")
                .to_string();
            writeln!(out, "phi = {:.12} (route {route_name})", res.value).map_err(io)?;
            let path = write_unitary(&cfg.out_dir, unitary.name(), dims, &route_name, res.value, cfg, meta)?;
            writeln!(out, "wrote {}", path.display()).map_err(io)?;
            Ok(vec![path])
        }
    }
}

fn run_verify(cfg: &CliConfig, t: &VerifyTask, out: &mut dyn Write) -> Result<(), CliError> {
    let mut failed = Vec::new();
    for &id in &t.identities {
        let r = run_identity(id, cfg.seed, t.samples)?;
        let unit = if r.unit == "sigma" { " sigma" } else { "" };
        writeln!(
            out,
            "{:<16} max residual {:.3e}{unit} (tolerance {:.0e}) {}",
            id.name(),
            r.max_residual,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        )
        .map_err(io)?;
        if !r.passed {
            failed.push(id.name());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed.join(", ")))
    }
}

fn run_figures(cfg: &CliConfig, t: &FiguresTask, pool: &Pool, meta: &RunMeta, out: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = Vec::new();
    if let Some(c) = &t.fig1 {
        for rec in fig1_pipeline(pool, c)? {
            let path = write_record(&cfg.out_dir, &rec, cfg, meta)?;
            writeln!(
                out,
                "wrote {} (pearson {:.6}, max |phi - ep| {:.3e})",
                path.display(),
                rec.aggregates.pearson.unwrap_or(f64::NAN),
                rec.aggregates.max_gap.unwrap_or(f64::NAN)
            )
            .map_err(io)?;
            paths.push(path);
        }
    }
    if let Some(c) = &t.fig2 {
        writeln!(out, "{:>3} {:>10} {:>16} {:>16}", "M", "haar", "nonintegrable", "integrable").map_err(io)?;
        for e in fig2_pipeline(pool, c)? {
            let path = write_record(&cfg.out_dir, &e.record, cfg, meta)?;
            writeln!(
                out,
                "{:>3} {:>10.6} {:>16.6} {:>16.6}",
                e.m, e.haar, e.nonintegrable.mean, e.integrable.mean
            )
            .map_err(io)?;
            paths.push(path);
        }
    }
    if let Some(c) = &t.fig3 {
        let rows = fig3_pipeline(pool, c)?;
        writeln!(out, "{:<20} {:>3} {:>10} {:>10} {:>12}", "model", "N", "phi", "typical", "deviation").map_err(io)?;
        for r in &rows {
            writeln!(
                out,
                "{:<20} {:>3} {:>10.6} {:>10.6} {:>12.4e}",
                r.model, r.n, r.phi_mean, r.typical, r.deviation
            )
            .map_err(io)?;
        }
        paths.push(write_scaling(&cfg.out_dir, "fig3-scaling", &rows, cfg, meta)?);
    }
    for p in &paths {
        writeln!(out, "{}", p.display()).map_err(io)?;
    }
    Ok(paths)
}

fn run_typical(t: &TypicalTask, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(dims) = &t.dims {
        let v = typical_phi(&AlgebraSet::full(dims)?)?;
        writeln!(out, "typical phi = {v:.12}").map_err(io)?;
    }
    if let Some(q) = &t.qubits {
        let r = typical_phi_qubit(q)?;
        writeln!(out, "typical phi = {:.12}", r.value).map_err(io)?;
        writeln!(out, "best clustering of {} qubits: single qubits, {:.12}", r.argmax.len(), r.max_value).map_err(io)?;
    }
    Ok(())
}
