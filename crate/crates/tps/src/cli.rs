//! Command-line flags. Every value is optional here so that flags, the
//! config file and built-in defaults can be layered in that order.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "tps", version, about = "Tensor-product-structure distance of unitary dynamics")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Seed of every random draw (Haar samples, disorder).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 or absent uses every core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML file with default values; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory; falls back to the config file, then $TPS_OUT_DIR, then ./out.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Φ of a Hamiltonian time series or of a single named unitary.
    Phi(PhiArgs),
    /// Run the identity cross-checks and report the largest residuals.
    Verify(VerifyArgs),
    /// Compute the data behind the three figures.
    Figures(FiguresArgs),
    /// Haar-typical value of Φ for a TPS or a clustered qubit chain.
    Typical(TypicalArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct PhiArgs {
    /// tfim, temperley-lieb (tl) or t-jz (tjz).
    #[arg(long)]
    pub model: Option<String>,
    /// Number of sites.
    #[arg(long = "N", value_name = "N")]
    pub n: Option<usize>,
    /// TFIM regime: nonintegrable, integrable, anderson or mbl.
    #[arg(long)]
    pub regime: Option<String>,
    /// `start:step:stop` or a comma-separated list.
    #[arg(long)]
    pub times: Option<String>,
    /// Measure Φ against M equal clusters of sites instead of single sites.
    #[arg(long, value_name = "M")]
    pub clusters: Option<usize>,
    /// Disorder realization index.
    #[arg(long)]
    pub realization: Option<u64>,
    /// identity, swap, cnot, two-unitary or haar.
    #[arg(long)]
    pub unitary: Option<String>,
    /// Local dimensions, e.g. `2,2`.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Local dimension of the two-unitary example.
    #[arg(long)]
    pub q: Option<usize>,
    /// auto, man, correlator or projection.
    #[arg(long)]
    pub route: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Identity to check (repeatable); all of them when absent.
    #[arg(long = "identity", value_name = "NAME")]
    pub identities: Vec<String>,
    /// Samples of the Monte Carlo checks.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FiguresArgs {
    /// 1, 2 or 3.
    #[arg(long)]
    pub which: Option<u8>,
    /// Chain length of figures 1 and 2.
    #[arg(long = "N", value_name = "N")]
    pub n: Option<usize>,
    /// Full-scale sizes (long runtimes).
    #[arg(long)]
    pub large: bool,
    /// Cluster counts of figure 2, comma-separated; default all divisors of N.
    #[arg(long, value_delimiter = ',')]
    pub clusters: Option<Vec<usize>>,
    /// Time grid of figure 1.
    #[arg(long)]
    pub times: Option<String>,
    /// Averaging window `t0:t1:samples` of figures 2 and 3.
    #[arg(long)]
    pub window: Option<String>,
    /// Disorder realizations of figure 3: desk, full or a count.
    #[arg(long)]
    pub repetitions: Option<String>,
    /// Average Temperley-Lieb and t-Jz couplings over realizations.
    #[arg(long)]
    pub average_tl_tjz: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TypicalArgs {
    /// Local dimensions of a TPS, e.g. `2,2,2`.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Qubits per cluster of a chain, e.g. `1,2,3`.
    #[arg(long, value_delimiter = ',')]
    pub qubits: Option<Vec<u32>>,
}
