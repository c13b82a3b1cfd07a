use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "darwinlab",
    version,
    about = "Redundancy, discord and information backflow in small open quantum systems",
    args_override_self = true
)]
pub struct Cli {
    /// Seed for every random draw of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Flat key=value file; keys are long flag names, flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads, 0 = one per core. Never changes results.
    #[arg(long, global = true, env = "DARWINLAB_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Partial information plot and plateau analysis.
    Pip(PipArgs),
    /// Sample entropic inequalities and report every draw.
    Certify(CertifyArgs),
    /// Trace-distance and ancilla-CMI backflow along one trajectory.
    Backflow(BackflowArgs),
    /// Redundancy and backflow against intra-environment coupling.
    Sweep(SweepArgs),
    /// Petz recovery from the ensemble average on random channels.
    Recovery(RecoveryArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum StateModel {
    Ghz,
    Branching,
    Product,
    Collision,
    Spinstar,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DynModel {
    Collision,
    Spinstar,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Ancilla {
    None,
    Maxent,
    Measured,
}

#[derive(Args, Debug, Clone)]
pub struct Dynamics {
    /// Number of single-qubit environment fragments.
    #[arg(long, default_value_t = 6)]
    pub n_env: usize,

    /// Controlled-rotation angle per collision (radians).
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub se_coupling: f64,

    /// Number of steps; defaults to the number of fragments.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PipArgs {
    #[arg(long, value_enum, default_value_t = StateModel::Ghz)]
    pub model: StateModel,

    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,

    /// symmetric_i, holevo_pointer or accessible_j.
    #[arg(long, default_value = "symmetric_i")]
    pub quantity: String,

    /// Per-fragment branch overlap for --model branching.
    #[arg(long, default_value_t = 0.3)]
    pub overlap: f64,

    /// Intra-environment partial-swap angle for the dynamical models.
    #[arg(long, default_value_t = 0.0)]
    pub g: f64,

    /// Monte Carlo subsets per fragment size when exhaustive averaging is too large.
    #[arg(long, default_value_t = 200)]
    pub subsets: usize,

    /// Average exhaustively when a fragment size has at most this many subsets.
    #[arg(long, default_value_t = 10_000)]
    pub exhaustive_cap: u64,

    #[command(flatten)]
    pub dynamics: Dynamics,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// ssa, dpi, holevo-mono, afw, recovery or all.
    #[arg(long, default_value = "all")]
    pub check: String,

    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct BackflowArgs {
    #[arg(long, value_enum, default_value_t = DynModel::Collision)]
    pub model: DynModel,

    #[arg(long, default_value_t = 0.0)]
    pub g: f64,

    #[arg(long, value_enum, default_value_t = Ancilla::Maxent)]
    pub ancilla: Ancilla,

    /// Comma-separated fragment labels for E_sub (default: all fragments).
    #[arg(long)]
    pub e_sub: Option<String>,

    #[command(flatten)]
    pub dynamics: Dynamics,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = DynModel::Collision)]
    pub model: DynModel,

    /// Comma-separated partial-swap angles.
    #[arg(long, default_value = "0,0.3,0.8")]
    pub g_list: String,

    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,

    /// none, bound22, bound29 or a comma list of both.
    #[arg(long, default_value = "none")]
    pub checks: String,

    #[command(flatten)]
    pub dynamics: Dynamics,
}

#[derive(Args, Debug)]
pub struct RecoveryArgs {
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
}
