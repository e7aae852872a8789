//! `coherence`: channel analysis, linear-optics synthesis and spectrum
//! sweeps from the command line.

mod commands;
mod literal;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "coherence", version, about = "Single-particle coherence under loss")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for the vacuum-preservation check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the main result here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Suppress the summary line on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Loss, preservation and creation of a channel for one input state.
    Lpc(LpcArgs),
    /// Check the exclusion inequality on random vacuum-preserving channels.
    VerifyInequality(VerifyArgs),
    /// Channel induced by a passive mode transformation with an ancilla.
    Linopt(LinoptArgs),
    /// Mach-Zehnder fringe with the channel in one arm.
    Mz(MzArgs),
    /// Absorption, excess-loss and superposition spectra.
    Spectrum(SpectrumArgs),
    /// Photon channel of a single model run.
    Extract(ExtractArgs),
}

#[derive(Debug, Args)]
pub struct PsiArgs {
    /// Comma-separated amplitudes, e.g. "0,0.6,0.8j".
    #[arg(long, allow_hyphen_values = true, conflicts_with = "psi_file")]
    pub psi: Option<String>,
    /// JSON array of [re, im] amplitudes.
    #[arg(long)]
    pub psi_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LpcArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[command(flatten)]
    pub psi: PsiArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Number of single-particle states.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,
    /// Environment dimension of the dilation.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub anc: u64,
    /// Random input states per channel.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub states: u64,
}

#[derive(Debug, Args)]
pub struct LinoptArgs {
    /// Mode unitary JSON {"K", "J", "S"}.
    #[arg(long)]
    pub smatrix: PathBuf,
    /// Ancilla state JSON {"J", "amplitudes"} or "vacuum".
    #[arg(long, default_value = "vacuum")]
    pub ancilla: String,
    /// Also write the induced channel here.
    #[arg(long)]
    pub emit_channel: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MzArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[command(flatten)]
    pub psi: PsiArgs,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(3..))]
    pub chi_points: u64,
    /// Haar-random path-B unitaries tried besides the analytic maximizer.
    #[arg(long, default_value_t = 0)]
    pub scan_unitaries: u64,
    /// Write the `chi,p_A` fringe here.
    #[arg(long)]
    pub fringe_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Jc,
    ThreeLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DissipatorArg {
    None,
    Relaxation,
    Dephasing,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub model: ModelKind,
    /// Sweep configuration JSON; defaults to the reference sweep.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub dissipator: Option<DissipatorArg>,
    /// Add the long-time envelope columns (t_max 500, t_step 0.5 unless configured).
    #[arg(long)]
    pub envelope: bool,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Model JSON with an "integration" {"dt", "t"} object.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Physics(String),
    #[error("{0}")]
    VacuumTest(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Io(_) => 4,
            CliError::Physics(_) => 5,
            CliError::VacuumTest(_) => 6,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Lpc(args) => commands::lpc(&cli.global, args),
        Command::VerifyInequality(args) => commands::verify_inequality(&cli.global, args),
        Command::Linopt(args) => commands::linopt(&cli.global, args),
        Command::Mz(args) => commands::mz(&cli.global, args),
        Command::Spectrum(args) => commands::spectrum(&cli.global, args),
        Command::Extract(args) => commands::extract(&cli.global, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}
