//! Time series of Φ under `U_t = exp(iHt)`, long-time averages and the
//! three figure-level experiments.
//!
//! Each pipeline diagonalizes a Hamiltonian once and then evaluates every
//! time point independently. Work is distributed through an [`Executor`],
//! which returns results in index order so the output never depends on how
//! many workers ran it.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry;
use crate::linalg::{herm_eig, propagator, EigenSystem};
use crate::models::{BuiltModel, Couplings, Family, ModelConfig, TfimRegime};
use crate::randomness::{typical_phi, typical_phi_clustered};
use crate::scrambling::bipartite_man;
use crate::structure::{AlgebraSet, TensorFactorization};
use crate::tolerance::Tolerances;

/// Index-ordered parallel map.
pub trait Executor: Sync {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

fn try_map<E: Executor, T: Send>(
    exec: &E,
    n: usize,
    f: impl Fn(usize) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    exec.map(n, f).into_iter().collect()
}

/// `start, start + step, …` up to `stop` inclusive (within half a step).
pub fn linear_grid(start: f64, step: f64, stop: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && step.is_finite() && stop.is_finite()) || step <= 0.0 || stop < start {
        return Err(Error::Invalid(format!("bad grid {start}:{step}:{stop}")));
    }
    let count = libm::floor((stop - start) / step + 0.5) as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

/// `count` points spaced evenly in `log t` from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && count >= 2) {
        return Err(Error::Invalid(format!("bad geometric grid {lo}..{hi} ({count})")));
    }
    let (a, b) = (libm::log(lo), libm::log(hi));
    Ok((0..count)
        .map(|k| libm::exp(a + (b - a) * k as f64 / (count - 1) as f64))
        .collect())
}

/// `t = 0`, 31 geometric points on `[1e-3, 1]`, then steps of 0.5 up to 100.
pub fn default_grid() -> Vec<f64> {
    let mut t = vec![0.0];
    t.extend(geometric_grid(1e-3, 1.0, 31).expect("valid constants"));
    t.extend(linear_grid(1.5, 0.5, 100.0).expect("valid constants"));
    t
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::Invalid(format!("time {t} is not a finite nonnegative number")));
    }
    Ok(())
}

/// Averaging window `[t0, t1]` sampled at `samples` midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
}

impl Window {
    pub const DEFAULT: Window = Window {
        t0: 50.0,
        t1: 500.0,
        samples: 256,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 >= 0.0 && self.t1 > self.t0 && self.t1.is_finite()) {
            return Err(Error::Invalid(format!("window [{}, {}] is empty", self.t0, self.t1)));
        }
        if self.samples < 16 {
            return Err(Error::Invalid(format!("window needs at least 16 samples, got {}", self.samples)));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let h = (self.t1 - self.t0) / self.samples as f64;
        (0..self.samples).map(|k| self.t0 + (k as f64 + 0.5) * h).collect()
    }
}

impl Default for Window {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Uniform-grid time average with its half-window diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongTimeAverage {
    pub mean: f64,
    /// Standard error of the sample mean (samples treated as independent).
    pub stderr: f64,
    pub first_half: f64,
    pub second_half: f64,
    pub converged: bool,
    pub samples: usize,
}

impl LongTimeAverage {
    pub fn from_samples(values: &[f64], tol: f64) -> Self {
        let n = values.len();
        let est = crate::randomness::Estimate::from_samples(values);
        let mid = n / 2;
        let mean_of = |xs: &[f64]| {
            if xs.is_empty() {
                est.mean
            } else {
                crate::randomness::Estimate::from_samples(xs).mean
            }
        };
        let first_half = mean_of(&values[..mid]);
        let second_half = mean_of(&values[mid..]);
        Self {
            mean: est.mean,
            stderr: est.stderr,
            first_half,
            second_half,
            converged: (first_half - second_half).abs() < tol,
            samples: n,
        }
    }
}

/// Average of realizations, each a [`LongTimeAverage`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderAverage {
    pub mean: f64,
    /// Spread over realizations, or the time-sampling error for a single one.
    pub stderr: f64,
    pub converged: bool,
    pub realizations: Vec<LongTimeAverage>,
}

impl DisorderAverage {
    pub fn from_realizations(realizations: Vec<LongTimeAverage>) -> Self {
        let means: Vec<f64> = realizations.iter().map(|r| r.mean).collect();
        let est = crate::randomness::Estimate::from_samples(&means);
        let stderr = if realizations.len() > 1 {
            est.stderr
        } else {
            realizations.first().map_or(0.0, |r| r.stderr)
        };
        Self {
            mean: est.mean,
            stderr,
            converged: realizations.iter().all(|r| r.converged),
            realizations,
        }
    }
}

/// Resolved inputs of a record: enough to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordConfig {
    pub experiment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    /// Couplings of every realization that entered the record.
    pub couplings: Vec<Couplings>,
    /// Local dimensions of the TPS Φ is measured against.
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub long_time: BTreeMap<String, LongTimeAverage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pearson: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leakage: Option<f64>,
}

/// A named column of values, one per time point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub label: String,
    pub config: RecordConfig,
    pub times: Vec<f64>,
    pub series: Vec<Series>,
    pub aggregates: Aggregates,
}

impl ExperimentRecord {
    pub fn new(label: impl Into<String>, config: RecordConfig, times: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            config,
            times,
            series: Vec::new(),
            aggregates: Aggregates::default(),
        }
    }

    pub fn push_series(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.times.len() {
            return Err(Error::Shape(format!(
                "series {name} has {} values for {} times",
                values.len(),
                self.times.len()
            )));
        }
        self.series.push(Series { name, values });
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|s| s.name == name).map(|s| s.values.as_slice())
    }
}

fn checked_phi(v: f64) -> Result<f64> {
    let tol = Tolerances::DEFAULT.compare;
    if !(v >= -tol && v <= 1.0 + tol) {
        return Err(Error::Numeric(format!("Φ = {v} lies outside [0, 1]")));
    }
    Ok(v)
}

fn site_dims(aset: &AlgebraSet) -> Vec<usize> {
    match aset.site_view() {
        Some(v) => v.tf.dims().to_vec(),
        None => vec![aset.dim()],
    }
}

/// Φ of `exp(iHt)` at every time, from one eigendecomposition.
pub fn phi_series<E: Executor>(exec: &E, es: &EigenSystem, aset: &AlgebraSet, times: &[f64]) -> Result<Vec<f64>> {
    check_times(times)?;
    if es.dim() != aset.dim() {
        return Err(Error::Shape(format!(
            "Hamiltonian has dimension {}, algebra set {}",
            es.dim(),
            aset.dim()
        )));
    }
    try_map(exec, times.len(), |k| {
        let u = propagator(es, times[k]);
        checked_phi(geometry::phi(aset, &u)?.value)
    })
}

pub fn phi_time_series(model: &BuiltModel, aset: &AlgebraSet, times: &[f64]) -> Result<ExperimentRecord> {
    phi_time_series_with(&Serial, model, aset, times)
}

pub fn phi_time_series_with<E: Executor>(
    exec: &E,
    model: &BuiltModel,
    aset: &AlgebraSet,
    times: &[f64],
) -> Result<ExperimentRecord> {
    check_times(times)?;
    let es = herm_eig(&model.hamiltonian)?;
    let values = phi_series(exec, &es, aset, times)?;
    let config = RecordConfig {
        experiment: "phi".into(),
        model: None,
        couplings: vec![model.couplings.clone()],
        dims: site_dims(aset),
        window: None,
    };
    let mut rec = ExperimentRecord::new("phi", config, times.to_vec());
    rec.push_series("phi", values)?;
    rec.aggregates.leakage = model.leakage;
    Ok(rec)
}

pub fn long_time_average(model: &BuiltModel, aset: &AlgebraSet, window: Window) -> Result<LongTimeAverage> {
    long_time_average_with(&Serial, &herm_eig(&model.hamiltonian)?, aset, window)
}

pub fn long_time_average_with<E: Executor>(
    exec: &E,
    es: &EigenSystem,
    aset: &AlgebraSet,
    window: Window,
) -> Result<LongTimeAverage> {
    window.validate()?;
    let values = phi_series(exec, es, aset, &window.times())?;
    Ok(LongTimeAverage::from_samples(&values, Tolerances::DEFAULT.half_window))
}

/// Pearson correlation coefficient; 0 when either series is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    if n == 0 {
        return 0.0;
    }
    let ma = a[..n].iter().sum::<f64>() / n as f64;
    let mb = b[..n].iter().sum::<f64>() / n as f64;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for k in 0..n {
        let (x, y) = (a[k] - ma, b[k] - mb);
        sab += x * y;
        saa += x * x;
        sbb += y * y;
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    sab / libm::sqrt(saa * sbb)
}

/// Φ and entangling power of a TFIM chain across the bipartition of its
/// first `n1` qubits from the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Config {
    pub n: usize,
    pub n1: usize,
    pub times: Vec<f64>,
}

impl Fig1Config {
    pub fn desk() -> Self {
        Self {
            n: 8,
            n1: 2,
            times: default_grid(),
        }
    }

    pub fn large() -> Self {
        Self {
            n: 10,
            ..Self::desk()
        }
    }
}

/// One record per regime, integrable first, each with columns `phi` and `ep`.
pub fn fig1_pipeline<E: Executor>(exec: &E, cfg: &Fig1Config) -> Result<Vec<ExperimentRecord>> {
    if cfg.n1 == 0 || cfg.n1 >= cfg.n {
        return Err(Error::Invalid(format!(
            "n1 = {} must leave both sides of an N = {} chain nonempty",
            cfg.n1, cfg.n
        )));
    }
    check_times(&cfg.times)?;
    let d1 = 1usize << cfg.n1;
    let d2 = 1usize << (cfg.n - cfg.n1);
    let mut out = Vec::new();
    for regime in [TfimRegime::Integrable, TfimRegime::Nonintegrable] {
        let model_cfg = ModelConfig::tfim(cfg.n, regime);
        let model = model_cfg.build(0)?;
        let es = herm_eig(&model.hamiltonian)?;
        let pairs = try_map(exec, cfg.times.len(), |k| {
            let u = propagator(&es, cfg.times[k]);
            let b = bipartite_man(&u, d1, d2)?;
            Ok((checked_phi(b.phi())?, b.entangling_power()))
        })?;
        let (phi, ep): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let label = format!("fig1-{}", regime.name());
        let config = RecordConfig {
            experiment: "fig1".into(),
            model: Some(model_cfg),
            couplings: vec![model.couplings.clone()],
            dims: vec![d1, d2],
            window: None,
        };
        let mut rec = ExperimentRecord::new(label, config, cfg.times.clone());
        rec.aggregates.pearson = Some(pearson(&phi, &ep));
        rec.aggregates.max_gap = Some(phi.iter().zip(&ep).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        rec.push_series("phi", phi)?;
        rec.push_series("ep", ep)?;
        out.push(rec);
    }
    Ok(out)
}

/// Long-time averages of a TFIM chain clustered into `M` equal groups of qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Config {
    pub n: usize,
    pub clusters: Vec<usize>,
    pub window: Window,
}

impl Fig2Config {
    /// All divisors of `n`.
    pub fn with_divisors(n: usize, window: Window) -> Self {
        Self {
            n,
            clusters: (1..=n).filter(|m| n % m == 0).collect(),
            window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Entry {
    pub m: usize,
    pub haar: f64,
    pub nonintegrable: LongTimeAverage,
    pub integrable: LongTimeAverage,
    /// Sampled series `phi_nonintegrable` and `phi_integrable` over the window.
    pub record: ExperimentRecord,
}

pub fn fig2_pipeline<E: Executor>(exec: &E, cfg: &Fig2Config) -> Result<Vec<Fig2Entry>> {
    cfg.window.validate()?;
    if cfg.clusters.is_empty() {
        return Err(Error::Invalid("no cluster counts requested".into()));
    }
    if let Some(&m) = cfg.clusters.iter().find(|&&m| m == 0 || cfg.n % m != 0) {
        return Err(Error::Invalid(format!("M = {m} does not divide N = {}", cfg.n)));
    }
    let d = 1usize << cfg.n;
    let asets: Vec<AlgebraSet> = cfg
        .clusters
        .iter()
        .map(|&m| AlgebraSet::full(&vec![1usize << (cfg.n / m); m]))
        .collect::<Result<_>>()?;
    let times = cfg.window.times();
    let regimes = [TfimRegime::Nonintegrable, TfimRegime::Integrable];
    let mut per_regime: Vec<(ModelConfig, Couplings, Vec<Vec<f64>>)> = Vec::new();
    for regime in regimes {
        let model_cfg = ModelConfig::tfim(cfg.n, regime);
        let model = model_cfg.build(0)?;
        let es = herm_eig(&model.hamiltonian)?;
        // One propagator per time, shared by every clustering.
        let rows = try_map(exec, times.len(), |k| {
            let u = propagator(&es, times[k]);
            asets
                .iter()
                .map(|a| checked_phi(geometry::phi(a, &u)?.value))
                .collect::<Result<Vec<f64>>>()
        })?;
        let columns = (0..asets.len())
            .map(|c| rows.iter().map(|r| r[c]).collect())
            .collect();
        per_regime.push((model_cfg, model.couplings, columns));
    }
    let tol = Tolerances::DEFAULT.half_window;
    let mut out = Vec::new();
    for (c, &m) in cfg.clusters.iter().enumerate() {
        let haar = typical_phi_clustered(d, m)?;
        let config = RecordConfig {
            experiment: "fig2".into(),
            model: Some(per_regime[0].0.clone()),
            couplings: per_regime.iter().map(|r| r.1.clone()).collect(),
            dims: vec![1usize << (cfg.n / m); m],
            window: Some(cfg.window),
        };
        let mut rec = ExperimentRecord::new(format!("fig2-M{m}"), config, times.clone());
        let non = LongTimeAverage::from_samples(&per_regime[0].2[c], tol);
        let int = LongTimeAverage::from_samples(&per_regime[1].2[c], tol);
        rec.push_series("phi_nonintegrable", per_regime[0].2[c].clone())?;
        rec.push_series("phi_integrable", per_regime[1].2[c].clone())?;
        rec.aggregates.haar = Some(haar);
        rec.aggregates.long_time.insert("nonintegrable".to_string(), non);
        rec.aggregates.long_time.insert("integrable".to_string(), int);
        out.push(Fig2Entry {
            m,
            haar,
            nonintegrable: non,
            integrable: int,
            record: rec,
        });
    }
    Ok(out)
}

/// How many disorder realizations a disordered case averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "count")]
pub enum Repetitions {
    /// `max(1, ⌊40/N⌋)`.
    Desk,
    /// `⌊200/N⌋`.
    Full,
    Fixed(usize),
}

impl Repetitions {
    pub fn count(self, n: usize) -> usize {
        match self {
            Self::Desk => crate::models::desk_repetitions(n),
            Self::Full => crate::models::disorder_repetitions(n),
            Self::Fixed(r) => r.max(1),
        }
    }
}

/// Sizes, window and disorder settings of the scaling experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Config {
    pub tfim_sizes: Vec<usize>,
    pub tl_sizes: Vec<usize>,
    pub tjz_sizes: Vec<usize>,
    pub window: Window,
    pub repetitions: Repetitions,
    /// Average the Temperley-Lieb and t-Jz couplings over realizations
    /// instead of using a single draw.
    pub average_tl_tjz: bool,
    pub seed: u64,
}

impl Fig3Config {
    pub fn desk() -> Self {
        Self {
            tfim_sizes: vec![4, 6, 8],
            tl_sizes: vec![3, 4, 5],
            tjz_sizes: vec![3, 4, 5],
            window: Window::DEFAULT,
            repetitions: Repetitions::Desk,
            average_tl_tjz: false,
            seed: 0,
        }
    }

    pub fn large() -> Self {
        Self {
            tfim_sizes: vec![4, 5, 6, 7, 8, 9, 10, 11],
            tl_sizes: vec![3, 4, 5, 6, 7],
            tjz_sizes: vec![3, 4, 5, 6, 7],
            repetitions: Repetitions::Full,
            ..Self::desk()
        }
    }

    /// Every (model, size) case in output order.
    pub fn cases(&self) -> Vec<ModelConfig> {
        let mut cases = Vec::new();
        for regime in TfimRegime::ALL {
            for &n in &self.tfim_sizes {
                cases.push(ModelConfig::tfim(n, regime).with_seed(self.seed));
            }
        }
        for (family, sizes) in [(Family::TemperleyLieb, &self.tl_sizes), (Family::TJz, &self.tjz_sizes)] {
            for &n in sizes {
                cases.push(ModelConfig::new(family, n).with_seed(self.seed));
            }
        }
        cases
    }

    pub fn realizations(&self, model: &ModelConfig) -> usize {
        let averaged = match model.family {
            Family::Tfim => model.is_disordered(),
            _ => self.average_tl_tjz,
        };
        if averaged {
            self.repetitions.count(model.n)
        } else {
            1
        }
    }
}

/// One line of the scaling table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub model: String,
    pub n: usize,
    pub dim: usize,
    pub realizations: usize,
    pub phi_mean: f64,
    pub phi_stderr: f64,
    pub typical: f64,
    /// `|Φ̄ − typical|`.
    pub deviation: f64,
    pub log_deviation: f64,
    pub converged: bool,
    /// Largest t-Jz projection leakage over realizations.
    pub leakage: Option<f64>,
}

pub fn fig3_case<E: Executor>(exec: &E, model: &ModelConfig, realizations: usize, window: Window) -> Result<(ScalingRow, DisorderAverage)> {
    window.validate()?;
    let mut avgs = Vec::with_capacity(realizations);
    let mut leakage: Option<f64> = None;
    let mut dims = Vec::new();
    for r in 0..realizations.max(1) {
        let built = model.build(r as u64)?;
        if let Some(l) = built.leakage {
            leakage = Some(leakage.map_or(l, |x: f64| x.max(l)));
        }
        dims = built.tf.dims().to_vec();
        let aset = AlgebraSet::FullTps(built.tf.clone());
        let es = herm_eig(&built.hamiltonian)?;
        avgs.push(long_time_average_with(exec, &es, &aset, window)?);
    }
    let avg = DisorderAverage::from_realizations(avgs);
    let tf = TensorFactorization::new(&dims)?;
    let typical = typical_phi(&AlgebraSet::FullTps(tf.clone()))?;
    let deviation = (avg.mean - typical).abs();
    let row = ScalingRow {
        model: model.label(),
        n: model.n,
        dim: tf.dim(),
        realizations: avg.realizations.len(),
        phi_mean: avg.mean,
        phi_stderr: avg.stderr,
        typical,
        deviation,
        log_deviation: libm::log(deviation),
        converged: avg.converged,
        leakage,
    };
    Ok((row, avg))
}

pub fn fig3_pipeline<E: Executor>(exec: &E, cfg: &Fig3Config) -> Result<Vec<ScalingRow>> {
    cfg.window.validate()?;
    cfg.cases()
        .iter()
        .map(|m| Ok(fig3_case(exec, m, cfg.realizations(m), cfg.window)?.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::free_unitary;
    use crate::linalg::{kron_all, DenseOperator};
    use crate::models::{build_tfim, build_tfim_with_coupling};
    use crate::oracle::phi_time_average_exact;
    use crate::randomness::{haar_unitary, SeededGenerator};
    use crate::scrambling::short_time_coefficient;

    #[test]
    fn grids() {
        assert_eq!(linear_grid(0.0, 0.1, 10.0).unwrap().len(), 101);
        assert!(linear_grid(0.0, -1.0, 1.0).is_err());
        let g = default_grid();
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 1e-3).abs() < 1e-15 && (g[g.len() - 1] - 100.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let w = Window { t0: 0.0, t1: 1.0, samples: 16 }.times();
        assert!((w[0] - 1.0 / 32.0).abs() < 1e-15);
        assert!(Window { t0: 0.0, t1: 1.0, samples: 8 }.validate().is_err());
    }

    #[test]
    fn series_starts_at_zero_and_local_models_stay_free() {
        let model = build_tfim(4, 0.5, &[1.05; 4]).unwrap();
        let aset = AlgebraSet::full(&[2, 2, 2, 2]).unwrap();
        let rec = phi_time_series(&model, &aset, &[0.0, 0.5, 1.0]).unwrap();
        let phi = rec.column("phi").unwrap();
        assert!(phi[0].abs() < 1e-12);
        assert!(phi[1] > 0.01);
        let local = build_tfim_with_coupling(4, 0.5, &[1.05; 4], 0.0).unwrap();
        let rec = phi_time_series(&local, &aset, &linear_grid(0.0, 0.7, 7.0).unwrap()).unwrap();
        assert!(rec.column("phi").unwrap().iter().all(|x| x.abs() < 1e-12));
        let avg = long_time_average(&local, &aset, Window { t0: 0.0, t1: 20.0, samples: 16 }).unwrap();
        assert!(avg.mean.abs() < 1e-12 && avg.converged);
        assert!(phi_time_series(&model, &aset, &[-1.0]).is_err());
    }

    #[test]
    fn short_time_matches_coefficient() {
        let model = build_tfim(4, 0.5, &[1.05; 4]).unwrap();
        let aset = AlgebraSet::FullTps(model.tf.clone());
        let k = short_time_coefficient(&model.hamiltonian, &model.tf).unwrap();
        let times = [1e-3, 3e-3, 1e-2];
        let rec = phi_time_series(&model, &aset, &times).unwrap();
        for (t, p) in times.iter().zip(rec.column("phi").unwrap()) {
            assert!((p / (k * t * t) - 1.0).abs() < 0.01, "t={t}: {p} vs {}", k * t * t);
        }
    }

    #[test]
    fn constant_series_average_is_exact() {
        let mut g = SeededGenerator::new(8);
        let u = haar_unitary(8, &mut g);
        let aset = AlgebraSet::full(&[2, 2, 2]).unwrap();
        let phi = geometry::phi(&aset, &u).unwrap().value;
        let avg = LongTimeAverage::from_samples(&[phi; 32], 1e-12);
        assert_eq!(avg.mean, phi);
        assert!(avg.converged && avg.stderr == 0.0);
    }

    #[test]
    fn invariant_under_local_conjugation_of_h() {
        let model = build_tfim(3, 0.5, &[1.05; 3]).unwrap();
        let mut g = SeededGenerator::new(2);
        let locals: Vec<DenseOperator> = (0..3).map(|_| haar_unitary(2, &mut g)).collect();
        let v = kron_all(&locals).unwrap();
        let rotated = BuiltModel {
            hamiltonian: model.hamiltonian.conjugate_by(&v).into_hermitian().unwrap(),
            ..model.clone()
        };
        let aset = AlgebraSet::FullTps(model.tf.clone());
        let times = linear_grid(0.0, 0.37, 5.0).unwrap();
        let a = phi_time_series(&model, &aset, &times).unwrap();
        let b = phi_time_series(&rotated, &aset, &times).unwrap();
        for (x, y) in a.column("phi").unwrap().iter().zip(b.column("phi").unwrap()) {
            assert!((x - y).abs() < 1e-10);
        }
        // Sanity: the conjugating unitary itself is free.
        let p = free_unitary(&model.tf, &[0, 1, 2], &locals).unwrap();
        assert!(geometry::phi(&aset, &p).unwrap().value.abs() < 1e-10);
    }

    #[test]
    fn long_time_average_matches_dephasing_oracle() {
        let model = build_tfim(6, 0.5, &[1.05; 6]).unwrap();
        let es = herm_eig(&model.hamiltonian).unwrap();
        let aset = AlgebraSet::FullTps(model.tf.clone());
        let avg = long_time_average_with(&Serial, &es, &aset, Window::DEFAULT).unwrap();
        let exact = phi_time_average_exact(&es, &model.tf, Tolerances::DEFAULT.gap_grouping).unwrap();
        assert!((avg.mean - exact).abs() < 0.02, "{} vs {exact}", avg.mean);
    }

    #[test]
    fn pearson_basics() {
        let a = [1.0, 2.0, 3.0];
        assert!((pearson(&a, &[2.0, 4.0, 6.0]) - 1.0).abs() < 1e-15);
        assert!((pearson(&a, &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert_eq!(pearson(&a, &[1.0, 1.0, 1.0]), 0.0);
    }

    #[test]
    fn fig1_small() {
        let cfg = Fig1Config {
            n: 4,
            n1: 1,
            times: linear_grid(0.0, 0.25, 5.0).unwrap(),
        };
        let recs = fig1_pipeline(&Serial, &cfg).unwrap();
        assert_eq!(recs.len(), 2);
        for r in &recs {
            assert_eq!(r.column("phi").unwrap()[0].abs() < 1e-12, true);
            assert!(r.column("ep").unwrap()[0].abs() < 1e-12);
            assert!(r.aggregates.pearson.unwrap() > 0.9);
        }
        assert!(fig1_pipeline(&Serial, &Fig1Config { n1: 4, ..cfg }).is_err());
    }

    #[test]
    fn fig2_small() {
        let cfg = Fig2Config::with_divisors(4, Window { t0: 10.0, t1: 60.0, samples: 32 });
        let out = fig2_pipeline(&Serial, &cfg).unwrap();
        assert_eq!(out.iter().map(|e| e.m).collect::<Vec<_>>(), vec![1, 2, 4]);
        assert_eq!(out[0].nonintegrable.mean, 0.0);
        assert_eq!(out[0].haar, 0.0);
        for e in &out {
            assert_eq!(e.record.times.len(), 32);
        }
        let bad = Fig2Config { clusters: vec![3], ..cfg };
        assert!(fig2_pipeline(&Serial, &bad).is_err());
    }

    #[test]
    fn fig3_case_rows() {
        let w = Window { t0: 10.0, t1: 60.0, samples: 16 };
        let (row, avg) = fig3_case(&Serial, &ModelConfig::tfim(4, TfimRegime::Anderson).with_seed(1), 3, w).unwrap();
        assert_eq!(row.realizations, 3);
        assert_eq!(avg.realizations.len(), 3);
        assert_eq!(row.dim, 16);
        assert!((row.deviation - (row.phi_mean - row.typical).abs()).abs() < 1e-15);
        let (row, _) = fig3_case(&Serial, &ModelConfig::new(Family::TJz, 3), 1, w).unwrap();
        assert!(row.leakage.unwrap() > 0.0);
        assert_eq!(row.dim, 27);
        let cfg = Fig3Config::desk();
        assert_eq!(cfg.cases().len(), 4 * 3 + 3 + 3);
        assert_eq!(cfg.realizations(&ModelConfig::tfim(8, TfimRegime::Mbl)), 5);
        assert_eq!(cfg.realizations(&ModelConfig::new(Family::TemperleyLieb, 5)), 1);
    }
}
