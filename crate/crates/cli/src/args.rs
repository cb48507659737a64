use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mxfreq",
    version,
    about = "Frequency-operator laboratory for N spin-1/2 particles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Sector table: k, λ_k, ln p_k, p_k, phase
    Table(Common),
    /// Mean, variance and ‖Δ‖ of M_x
    Moments(Common),
    /// Largest overlap with any M_x eigenstate, with a power-law fit
    Squires(Common),
    /// Distance from |Ψ> to the eigenstate |k>
    DeltaPsi {
        #[command(flatten)]
        common: Common,
        /// Sector index; defaults to the most probable k
        #[arg(long)]
        k: Option<u64>,
    },
    /// ε-truncation: window, kept mass, distance, outcome bounds
    Truncate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        normalize: Switch,
    },
    /// Evaluate a quantity over an N grid and fit a power law
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        quantity: QuantityArg,
        /// Required for window-mass
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Monte Carlo measurement of M_x
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SamplerArg::Sector)]
        sampler: SamplerArg,
        /// Also report the fraction of shots with |λ_k - σ̄_x| <= 2ε
        #[arg(long)]
        eps: Option<f64>,
        /// Emit per-k counts instead of a summary record
        #[arg(long)]
        histogram: bool,
    },
    /// Compare the sector decomposition against dense 2^N linear algebra
    OracleCheck {
        #[command(flatten)]
        common: Common,
        /// Random amplitude pairs per N when no state is given
        #[arg(long, default_value_t = 20)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Particle count (`100`, `1e6`) or geometric grid `start:stop`
    #[arg(long)]
    pub n: String,
    /// Grid points per decade
    #[arg(long, default_value_t = 3)]
    pub ppd: u32,
    /// |c+|^2 with real amplitudes
    #[arg(long, conflicts_with_all = ["c_plus", "c_minus"])]
    pub p: Option<f64>,
    /// Complex amplitude of |+>, e.g. `0.8` or `0.6+0.1i`
    #[arg(long, requires = "c_minus", allow_hyphen_values = true)]
    pub c_plus: Option<String>,
    /// Complex amplitude of |->
    #[arg(long, requires = "c_plus", allow_hyphen_values = true)]
    pub c_minus: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of stdout
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    MaxOverlap,
    DeltaNorm,
    DeltaPsi,
    PeakWidth,
    WindowMass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Sector,
    PerParticle,
}
