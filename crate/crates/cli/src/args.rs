use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "gravidec",
    version,
    about = "Gravitational decoherence rates, dephasing runs, graviton kernels and matter-ball states"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Si,
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Unit system for inputs and reported values
    #[arg(long, global = true, value_enum)]
    pub units: Option<Units>,

    /// Output format (default: table, or csv for `evolve` and `kernel`)
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,

    /// Write data to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Optional JSON config file; flags override its values
    #[arg(long, global = true, env = "GRAVIDEC_CONFIG")]
    pub config: Option<PathBuf>,

    /// Kernel UV regulator length (natural units: metres)
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,

    /// Numerical tolerance override
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decoherence rate for an energy gap and temperature
    Rate(RateArgs),
    /// Preset thermal-graviton scenarios
    Scenario(ScenarioArgs),
    /// Dephasing of a Fock-state superposition in an Ohmic bath
    Evolve(EvolveArgs),
    /// Graviton noise and dissipation kernels
    Kernel(KernelArgs),
    /// Gaussian matter balls and their pair decoherence rate
    Ball(BallArgs),
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Energy gap with unit suffix: J, eV, GeV, kg, atoms (e.g. `1eV`)
    #[arg(long = "delta-e", allow_hyphen_values = true)]
    pub delta_e: String,

    /// Temperature in kelvin
    #[arg(long, allow_negative_numbers = true)]
    pub temp: f64,

    /// Markov time in seconds, used for the markov_ok flag
    #[arg(long = "markov-time")]
    pub markov_time: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// atom_1eV, gram_avogadro, kilogram or all
    #[arg(long, default_value = "all")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Highest retained Fock level
    #[arg(long, default_value_t = 4)]
    pub nmax: usize,

    /// Dimensionless bath coupling C
    #[arg(long)]
    pub c: f64,

    /// Bath temperature in kelvin
    #[arg(long, allow_negative_numbers = true)]
    pub temp: f64,

    /// Oscillator frequency in rad/s
    #[arg(long, default_value_t = 1e9)]
    pub omega0: f64,

    /// Final time in seconds
    #[arg(long)]
    pub tmax: f64,

    /// Number of output intervals
    #[arg(long, default_value_t = 200)]
    pub steps: usize,

    /// Initial pure state as `n:amplitude` pairs, e.g. `0:1,2:1` or `0:1,1:0.5i`
    #[arg(long)]
    pub state: String,

    /// Bath cutoff frequency in rad/s for the numeric propagation (default 100·k_BT/ħ)
    #[arg(long)]
    pub cutoff: Option<f64>,

    /// Emit every pair n ≤ ñ ≤ nmax instead of only the populated levels
    #[arg(long = "all-pairs")]
    pub all_pairs: bool,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// N (noise), D (dissipation) or intN (time-integrated noise, t read as t_max)
    #[arg(long)]
    pub which: String,

    /// Separation in metres
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,

    /// Time (natural: c·t; si: seconds)
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,

    /// Temperature (natural: k_BT/ħc; si: kelvin)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub temp: f64,

    /// Coupling κ (default 4 in natural mode, √(32πG) in SI mode)
    #[arg(long)]
    pub kappa: Option<f64>,

    /// Grid as `r=start:stop:count,t=start:stop:count`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,

    /// Cap on thermal series terms
    #[arg(long = "n-terms")]
    pub n_terms: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BallArgs {
    /// Field mass (natural: m⁻¹; si: kilograms)
    #[arg(long)]
    pub m: f64,

    /// Field amplitude φ₀ in m⁻¹
    #[arg(long)]
    pub phi0: f64,

    /// Ball radius in metres
    #[arg(long)]
    pub radius: f64,

    /// Centre as `x,y,z` in metres
    #[arg(long, allow_hyphen_values = true)]
    pub r0: Option<String>,

    /// Second ball as `phi0,radius[,x,y,z]` (same field mass)
    #[arg(long, allow_hyphen_values = true)]
    pub pair: Option<String>,

    /// Temperature in kelvin for the pair rate
    #[arg(long, allow_negative_numbers = true)]
    pub temp: Option<f64>,

    /// Number of profile samples in CSV output
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
}
