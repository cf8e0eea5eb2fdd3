use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use xyjoint::qubit::{Axis, Sign};

use crate::checks::DEFAULT_GRID;

/// Simulate and analyse joint measurements of two qubit spin components.
#[derive(Debug, Parser)]
#[command(name = "xyjoint", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the four POVM elements for a visibility triple.
    BuildPovm(BuildPovmArgs),
    /// Run a simulated experiment and write its counts.
    Simulate(SimulateArgs),
    /// Estimate visibilities, C² and the classicality verdict from counts files.
    Estimate(EstimateArgs),
    /// Reconstruct the Kirkwood-Dirac distribution of a single-qubit input.
    Reconstruct(ReconstructArgs),
    /// Run the identity and invariant sweeps.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct VisibilityArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub vx: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub vy: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub vz: f64,
}

#[derive(Debug, Args)]
pub struct BuildPovmArgs {
    #[command(flatten)]
    pub visibilities: VisibilityArgs,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Eigenstate,
    Pair,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub visibilities: VisibilityArgs,
    /// Input eigenstate axis, X or Y (eigenstate mode).
    #[arg(long, value_parser = parse_axis)]
    pub axis: Option<Axis>,
    /// Input eigenvalue, +1 or -1 (eigenstate mode).
    #[arg(long, value_parser = parse_sign, allow_negative_numbers = true)]
    pub value: Option<Sign>,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..=i64::MAX as u64))]
    pub shots: u64,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u64).range(0..=i64::MAX as u64))]
    pub seed: u64,
    /// Singlet weight of the Werner source (pair mode).
    #[arg(long)]
    pub werner_p: Option<f64>,
    /// Apply a random Z rotation by π before each shot (eigenstate mode).
    #[arg(long)]
    pub randomize_flips: bool,
    /// Worker threads for the sampler; counts do not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=1024))]
    pub threads: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Counts files written by `simulate`.
    pub counts: Vec<PathBuf>,
    /// Fail unless X-eigenstate, Y-eigenstate and pair runs are all present.
    #[arg(long)]
    pub full: bool,
    /// Undo the Werner dilution recorded in the pair runs.
    #[arg(long)]
    pub werner_correct: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateArg {
    #[value(name = "x+")]
    XPlus,
    #[value(name = "x-")]
    XMinus,
    #[value(name = "y+")]
    YPlus,
    #[value(name = "y-")]
    YMinus,
    #[value(name = "z+")]
    ZPlus,
    #[value(name = "z-")]
    ZMinus,
    Mixed,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Eigenstate-mode counts file.
    #[arg(long, conflicts_with = "exact_state", required_unless_present = "exact_state")]
    pub counts: Option<PathBuf>,
    /// Use exact outcome probabilities for a named input state.
    #[arg(long, value_enum)]
    pub exact_state: Option<StateArg>,
    /// Estimate report supplying vx, vy and |vz|.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub vx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub vy: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub vz: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    YSign,
    ElementSign,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Lattice points per visibility axis.
    #[arg(long, default_value_t = DEFAULT_GRID, value_parser = parse_grid)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    s.parse()
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s {
        "+1" | "+" | "1" | "plus" => Ok(Sign::Plus),
        "-1" | "-" | "minus" => Ok(Sign::Minus),
        other => Err(format!("expected +1 or -1, found {other:?}")),
    }
}

fn parse_grid(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if (2..=101).contains(&n) => Ok(n),
        _ => Err(format!("expected an integer from 2 to 101, found {s:?}")),
    }
}
