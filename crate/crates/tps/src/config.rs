//! The TOML config file, value parsers shared with the flags, and the
//! fully resolved [`CliConfig`] that is echoed into every sidecar.
//!
//! Precedence: explicit flag, then config file, then built-in default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tps_core::dynamics::{default_grid, linear_grid, Fig1Config, Fig2Config, Fig3Config, Repetitions, Window};
use tps_core::models::{Family, ModelConfig, TfimRegime};

use crate::cli::{Cli, Command, FiguresArgs, PhiArgs, TypicalArgs, VerifyArgs};
use crate::error::CliError;
use crate::verify::Identity;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TPS_OUT_DIR";

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum TimesValue {
    List(Vec<f64>),
    Spec(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum WindowValue {
    Table(Window),
    Spec(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RepetitionsValue {
    Count(usize),
    Name(String),
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiFile {
    pub model: Option<String>,
    #[serde(alias = "N")]
    pub n: Option<usize>,
    pub regime: Option<String>,
    pub times: Option<TimesValue>,
    pub clusters: Option<usize>,
    pub realization: Option<u64>,
    pub unitary: Option<String>,
    pub dims: Option<Vec<usize>>,
    pub q: Option<usize>,
    pub route: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiguresFile {
    pub which: Option<u8>,
    #[serde(alias = "N")]
    pub n: Option<usize>,
    pub large: Option<bool>,
    pub clusters: Option<Vec<usize>>,
    pub times: Option<TimesValue>,
    pub window: Option<WindowValue>,
    pub repetitions: Option<RepetitionsValue>,
    pub average_tl_tjz: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFile {
    pub identities: Option<Vec<String>>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypicalFile {
    pub dims: Option<Vec<usize>>,
    pub qubits: Option<Vec<u32>>,
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub phi: PhiFile,
    #[serde(default)]
    pub figures: FiguresFile,
    #[serde(default)]
    pub verify: VerifyFile,
    #[serde(default)]
    pub typical: TypicalFile,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

pub fn parse_family(s: &str) -> Result<Family, CliError> {
    match s {
        "tfim" => Ok(Family::Tfim),
        "temperley-lieb" | "tl" => Ok(Family::TemperleyLieb),
        "t-jz" | "tjz" => Ok(Family::TJz),
        _ => Err(usage(format!("unknown model {s:?}; expected tfim, temperley-lieb or t-jz"))),
    }
}

pub fn parse_regime(s: &str) -> Result<TfimRegime, CliError> {
    TfimRegime::ALL
        .into_iter()
        .find(|r| r.name() == s)
        .ok_or_else(|| usage(format!("unknown regime {s:?}; expected nonintegrable, integrable, anderson or mbl")))
}

fn parse_f64(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("{s:?} is not a number")))
}

/// `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_times(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let times = match parts.as_slice() {
        [start, step, stop] => linear_grid(parse_f64(start)?, parse_f64(step)?, parse_f64(stop)?)?,
        [_] => s.split(',').map(parse_f64).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(usage(format!("times {s:?}: expected start:step:stop or a list"))),
    };
    check_times(times)
}

fn check_times(times: Vec<f64>) -> Result<Vec<f64>, CliError> {
    if times.is_empty() {
        return Err(usage("empty time grid"));
    }
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(usage(format!("time {t} is not a finite nonnegative number")));
    }
    Ok(times)
}

fn resolve_times(v: &TimesValue) -> Result<Vec<f64>, CliError> {
    match v {
        TimesValue::List(l) => check_times(l.clone()),
        TimesValue::Spec(s) => parse_times(s),
    }
}

/// `t0:t1:samples`.
pub fn parse_window(s: &str) -> Result<Window, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [t0, t1, n] = parts.as_slice() else {
        return Err(usage(format!("window {s:?}: expected t0:t1:samples")));
    };
    let samples = n
        .trim()
        .parse::<usize>()
        .map_err(|_| usage(format!("window sample count {n:?} is not an integer")))?;
    let w = Window {
        t0: parse_f64(t0)?,
        t1: parse_f64(t1)?,
        samples,
    };
    w.validate()?;
    Ok(w)
}

pub fn parse_repetitions(s: &str) -> Result<Repetitions, CliError> {
    match s {
        "desk" => Ok(Repetitions::Desk),
        "full" => Ok(Repetitions::Full),
        _ => s
            .parse::<usize>()
            .ok()
            .filter(|&r| r > 0)
            .map(Repetitions::Fixed)
            .ok_or_else(|| usage(format!("repetitions {s:?}: expected desk, full or a positive count"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitaryKind {
    Identity,
    Swap,
    Cnot,
    TwoUnitary,
    Haar,
}

impl UnitaryKind {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "identity" => Ok(Self::Identity),
            "swap" => Ok(Self::Swap),
            "cnot" => Ok(Self::Cnot),
            "two-unitary" => Ok(Self::TwoUnitary),
            "haar" => Ok(Self::Haar),
            _ => Err(usage(format!(
                "unknown unitary {s:?}; expected identity, swap, cnot, two-unitary or haar"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Swap => "swap",
            Self::Cnot => "cnot",
            Self::TwoUnitary => "two-unitary",
            Self::Haar => "haar",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteChoice {
    Auto,
    Man,
    Correlator,
    Projection,
}

impl RouteChoice {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "auto" => Ok(Self::Auto),
            "man" => Ok(Self::Man),
            "correlator" => Ok(Self::Correlator),
            "projection" => Ok(Self::Projection),
            _ => Err(usage(format!("unknown route {s:?}; expected auto, man, correlator or projection"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "source")]
pub enum PhiTask {
    Model {
        model: ModelConfig,
        /// Number of equal clusters Φ is measured against.
        clusters: usize,
        realization: u64,
        times: Vec<f64>,
    },
    Unitary {
        unitary: UnitaryKind,
        dims: Vec<usize>,
        route: RouteChoice,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiguresTask {
    pub which: u8,
    pub large: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fig1: Option<Fig1Config>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fig2: Option<Fig2Config>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fig3: Option<Fig3Config>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyTask {
    pub identities: Vec<Identity>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypicalTask {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubits: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Phi(PhiTask),
    Verify(VerifyTask),
    Figures(FiguresTask),
    Typical(TypicalTask),
}

/// Everything a run depends on, after layering flags over the config file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliConfig {
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_file: Option<PathBuf>,
    pub task: Task,
}

impl CliConfig {
    /// Resolves the parsed flags, reading `--config` when given.
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let file = match &cli.global.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let env_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
        Self::resolve(cli, &file, env_out)
    }

    pub fn resolve(cli: &Cli, file: &FileConfig, env_out: Option<PathBuf>) -> Result<Self, CliError> {
        let g = &cli.global;
        let seed = g.seed.or(file.seed).unwrap_or(0);
        let task = match &cli.command {
            Command::Phi(a) => Task::Phi(resolve_phi(a, &file.phi)?),
            Command::Verify(a) => Task::Verify(resolve_verify(a, &file.verify)?),
            Command::Figures(a) => Task::Figures(resolve_figures(a, &file.figures, seed)?),
            Command::Typical(a) => Task::Typical(resolve_typical(a, &file.typical)?),
        };
        Ok(Self {
            seed,
            threads: g.threads.or(file.threads),
            out_dir: g
                .out
                .clone()
                .or_else(|| file.out.clone())
                .or(env_out)
                .unwrap_or_else(|| PathBuf::from("out")),
            config_file: g.config.clone(),
            task,
        })
    }
}

fn resolve_phi(a: &PhiArgs, f: &PhiFile) -> Result<PhiTask, CliError> {
    let model = a.model.as_ref().or(f.model.as_ref());
    let unitary = a.unitary.as_ref().or(f.unitary.as_ref());
    match (model, unitary) {
        (Some(_), Some(_)) => Err(usage("give either --model or --unitary, not both")),
        (None, None) => Err(usage("phi needs --model or --unitary")),
        (Some(m), None) => {
            let family = parse_family(m)?;
            let n = a.n.or(f.n).unwrap_or(match family {
                Family::Tfim => 4,
                _ => 3,
            });
            let regime = match (family, a.regime.as_ref().or(f.regime.as_ref())) {
                (Family::Tfim, Some(r)) => Some(parse_regime(r)?),
                (Family::Tfim, None) => Some(TfimRegime::Nonintegrable),
                (_, Some(_)) => return Err(usage("--regime only applies to tfim")),
                (_, None) => None,
            };
            let model = ModelConfig {
                family,
                n,
                regime,
                disorder_seed: 0,
            };
            model.validate()?;
            let clusters = a.clusters.or(f.clusters).unwrap_or(n);
            if clusters == 0 || n % clusters != 0 {
                return Err(usage(format!("--clusters {clusters} does not divide N = {n}")));
            }
            let times = match (&a.times, &f.times) {
                (Some(s), _) => parse_times(s)?,
                (None, Some(v)) => resolve_times(v)?,
                (None, None) => default_grid(),
            };
            Ok(PhiTask::Model {
                model,
                clusters,
                realization: a.realization.or(f.realization).unwrap_or(0),
                times,
            })
        }
        (None, Some(u)) => {
            let kind = UnitaryKind::parse(u)?;
            let q = a.q.or(f.q);
            let dims = a.dims.clone().or_else(|| f.dims.clone());
            let dims = match (kind, dims, q) {
                (UnitaryKind::TwoUnitary, None, q) => {
                    let q = q.unwrap_or(3);
                    vec![q, q]
                }
                (UnitaryKind::TwoUnitary, Some(_), Some(_)) => {
                    return Err(usage("two-unitary takes --q or --dims, not both"))
                }
                (_, Some(d), _) => d,
                (_, None, _) => vec![2, 2],
            };
            let route = RouteChoice::parse(a.route.as_deref().or(f.route.as_deref()).unwrap_or("auto"))?;
            Ok(PhiTask::Unitary {
                unitary: kind,
                dims,
                route,
            })
        }
    }
}

fn resolve_verify(a: &VerifyArgs, f: &VerifyFile) -> Result<VerifyTask, CliError> {
    let names: Vec<String> = if !a.identities.is_empty() {
        a.identities.clone()
    } else {
        f.identities.clone().unwrap_or_default()
    };
    let identities = if names.is_empty() || names.iter().any(|n| n == "all") {
        Identity::ALL.to_vec()
    } else {
        names.iter().map(|n| Identity::parse(n)).collect::<Result<_, _>>()?
    };
    let samples = a.samples.or(f.samples).unwrap_or(20_000);
    if samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    Ok(VerifyTask { identities, samples })
}

fn resolve_figures(a: &FiguresArgs, f: &FiguresFile, seed: u64) -> Result<FiguresTask, CliError> {
    let which = a
        .which
        .or(f.which)
        .ok_or_else(|| usage("figures needs --which 1, 2 or 3"))?;
    let large = a.large || f.large.unwrap_or(false);
    let n = a.n.or(f.n);
    let window = match (&a.window, &f.window) {
        (Some(s), _) => parse_window(s)?,
        (None, Some(WindowValue::Spec(s))) => parse_window(s)?,
        (None, Some(WindowValue::Table(w))) => {
            w.validate()?;
            *w
        }
        (None, None) => Window::DEFAULT,
    };
    let mut task = FiguresTask {
        which,
        large,
        fig1: None,
        fig2: None,
        fig3: None,
    };
    match which {
        1 => {
            let mut cfg = if large { Fig1Config::large() } else { Fig1Config::desk() };
            if let Some(n) = n {
                cfg.n = n;
            }
            match (&a.times, &f.times) {
                (Some(s), _) => cfg.times = parse_times(s)?,
                (None, Some(v)) => cfg.times = resolve_times(v)?,
                (None, None) => {}
            }
            if cfg.n <= cfg.n1 {
                return Err(usage(format!("figure 1 needs N > {}", cfg.n1)));
            }
            task.fig1 = Some(cfg);
        }
        2 => {
            let n = n.unwrap_or(if large { 12 } else { 8 });
            let mut cfg = Fig2Config::with_divisors(n, window);
            if let Some(c) = a.clusters.clone().or_else(|| f.clusters.clone()) {
                cfg.clusters = c;
            }
            if let Some(&m) = cfg.clusters.iter().find(|&&m| m == 0 || n % m != 0) {
                return Err(usage(format!("M = {m} does not divide N = {n}")));
            }
            task.fig2 = Some(cfg);
        }
        3 => {
            let mut cfg = if large { Fig3Config::large() } else { Fig3Config::desk() };
            cfg.window = window;
            cfg.seed = seed;
            cfg.average_tl_tjz = a.average_tl_tjz || f.average_tl_tjz.unwrap_or(false);
            match (&a.repetitions, &f.repetitions) {
                (Some(s), _) => cfg.repetitions = parse_repetitions(s)?,
                (None, Some(RepetitionsValue::Name(s))) => cfg.repetitions = parse_repetitions(s)?,
                (None, Some(RepetitionsValue::Count(c))) => {
                    cfg.repetitions = parse_repetitions(&c.to_string())?
                }
                (None, None) => {}
            }
            if n.is_some() {
                return Err(usage("figure 3 uses fixed size lists; --N does not apply"));
            }
            task.fig3 = Some(cfg);
        }
        w => return Err(usage(format!("--which {w}: expected 1, 2 or 3"))),
    }
    Ok(task)
}

fn resolve_typical(a: &TypicalArgs, f: &TypicalFile) -> Result<TypicalTask, CliError> {
    let dims = a.dims.clone().or_else(|| f.dims.clone());
    let qubits = a.qubits.clone().or_else(|| f.qubits.clone());
    match (&dims, &qubits) {
        (Some(_), Some(_)) => Err(usage("give either --dims or --qubits, not both")),
        (None, None) => Err(usage("typical needs --dims or --qubits")),
        _ => Ok(TypicalTask { dims, qubits }),
    }
}
