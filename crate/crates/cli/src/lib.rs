//! The `errgeom` command line: property suites, parameter scans, named
//! demonstrations and Ozawa-chain comparisons.
//!
//! Exit codes: 0 when everything checked holds, 1 when a property is
//! violated, 2 for usage and IO errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod chain;
pub mod demo;
pub mod inputs;
pub mod manifest;
pub mod scan;
pub mod verify;

pub use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(
    name = "errgeom",
    version,
    about = "State-local measurement error and error-error uncertainty relations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every property suite over random instances.
    Verify(VerifyArgs),
    /// Sweep a measurement family and write one CSV row per grid point.
    Scan(ScanArgs),
    /// Print a named worked scenario.
    Demo(DemoArgs),
    /// Compare Ozawa's error with the state-local error for indirect models.
    Chain(ChainArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Hilbert space dimensions, each in 2..=8.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4, 5],
          value_parser = clap::value_parser!(u16).range(2..=8))]
    pub dims: Vec<u16>,
    /// Instances per dimension and suite.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Print the JSON manifest instead of the text summary.
    #[arg(long)]
    pub json: bool,
    /// Relative tolerance for identities and inequalities.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Run with a deliberately broken computation (harness self-test).
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Qubit effects `(I +- eta n.sigma)/2`, parameter `eta`.
    Unsharp,
    /// `lambda P_w + (1 - lambda) I/n` for a measured observable, parameter `lambda`.
    NoisyProjective,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// `start:step:stop` or a comma-separated list of values.
    #[arg(long, default_value = "0:0.1:1")]
    pub grid: String,
    /// Density matrix JSON; defaults to the maximally mixed state.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// JSON array `[A, B]` of observables; defaults to `[Z, X]` on a qubit.
    #[arg(long)]
    pub observables: Option<PathBuf>,
    /// Observable measured by the noisy-projective family; defaults to `A`.
    #[arg(long)]
    pub measured: Option<PathBuf>,
    /// Bloch axis of the unsharp family.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.0, 1.0])]
    pub axis: Vec<f64>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    NaiveViolation,
    KrReduction,
    OzawaChain,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(value_enum)]
    pub name: DemoName,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    /// CNOT onto an ancilla in `|0>`, meter Z.
    Cnot,
    /// No coupling; ancilla in `|0>`, meter Z.
    Uncoupled,
    /// Random Haar models swept over `--dims` and `--n`.
    Random,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long, value_enum, default_value = "cnot", conflicts_with = "model_file")]
    pub model: ModelChoice,
    /// Indirect model JSON; overrides `--model`.
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    /// Density matrix JSON for single-model runs; defaults to `(I + 0.8 Y)/2`
    /// on a qubit system and the maximally mixed state otherwise.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// JSON array `[A, B]`; defaults to `[X, Z]` on a qubit system.
    #[arg(long)]
    pub observables: Option<PathBuf>,
    /// System dimensions for random sweeps.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3],
          value_parser = clap::value_parser!(u16).range(2..=8))]
    pub dims: Vec<u16>,
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

/// Whether every checked property held; `Err` means a usage or IO problem.
pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<bool> {
    match cli.command {
        Command::Verify(args) => verify::run(&args, out),
        Command::Scan(args) => scan::run(&args, out),
        Command::Demo(args) => demo::run(&args, out),
        Command::Chain(args) => chain::run(&args, out),
    }
}
