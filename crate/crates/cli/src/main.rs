//! `spin1fw`: spectra, stationary states, spin evolution and verification
//! reports for a spin-1 particle in a magnetic field.

mod commands;
mod config;
mod format;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spin1fw_core::fw_amm::H0Policy;
use spin1fw_core::landau::ParticleParams;

#[derive(Debug, Parser)]
#[command(name = "spin1fw", version, about, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energy levels with degeneracy groups, as CSV.
    Spectrum(SpectrumArgs),
    /// Stationary spin states of one Landau sector, as JSON.
    Stationary(SectorArgs),
    /// Time series of spin observables, as CSV.
    Evolve(EvolveArgs),
    /// Runs a verification suite and writes a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
struct Physics {
    /// Mass.
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Signed charge.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    e: f64,
    /// Gyromagnetic factor.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    g: f64,
    /// Field strength.
    #[arg(long = "B", default_value_t = 0.1, allow_negative_numbers = true)]
    field: f64,
    /// Longitudinal momentum.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pz: f64,
}

impl Physics {
    fn params(&self) -> spin1fw_core::error::Result<ParticleParams> {
        ParticleParams::new(self.m, self.e, self.g, self.field, self.pz)
    }
}

#[derive(Debug, Clone, Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Closed-form g = 2 levels.
    Exact,
    /// Stationary energies of the reduced 3×3 Hamiltonian, any g.
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    Zero,
    EpsilonPrime,
}

impl From<Policy> for H0Policy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Zero => H0Policy::Zero,
            Policy::EpsilonPrime => H0Policy::EpsilonPrime,
        }
    }
}

impl Policy {
    fn name(self) -> &'static str {
        match self {
            Policy::Zero => "zero",
            Policy::EpsilonPrime => "epsilon-prime",
        }
    }
}

#[derive(Debug, Clone, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    physics: Physics,
    /// Highest Landau index.
    #[arg(long, default_value_t = 10)]
    nmax: u32,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long = "h0-policy", value_enum, default_value_t = Policy::EpsilonPrime)]
    h0_policy: Policy,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Args)]
struct SectorArgs {
    #[command(flatten)]
    physics: Physics,
    /// Landau index.
    #[arg(long, default_value_t = 0)]
    n: u32,
    #[arg(long = "h0-policy", value_enum, default_value_t = Policy::EpsilonPrime)]
    h0_policy: Policy,
    /// Add a metadata section with the wall-clock time.
    #[arg(long)]
    timestamp: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Args)]
struct EvolveArgs {
    #[command(flatten)]
    physics: Physics,
    /// Landau index.
    #[arg(long, default_value_t = 0)]
    n: u32,
    #[arg(long = "h0-policy", value_enum, default_value_t = Policy::EpsilonPrime)]
    h0_policy: Policy,
    /// Initial state: sz:+1, sz:0, sz:-1, sx:+1 or custom:a,b,c with complex
    /// amplitudes in the S_z basis (normalized on input).
    #[arg(long, default_value = "sx:+1")]
    init: String,
    #[arg(long, default_value_t = 1000.0)]
    tmax: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Drop the tensor coupling from the Hamiltonian.
    #[arg(long = "force-kappa-zero")]
    force_kappa_zero: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: verify::Suite,
    /// Grid sizes for the refinement studies.
    #[arg(long, value_delimiter = ',', default_values_t = spin1fw_core::grid::DEFAULT_GRIDS)]
    grids: Vec<usize>,
    /// Add a metadata section with the wall-clock time.
    #[arg(long)]
    timestamp: bool,
    #[command(flatten)]
    output: Output,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Verification,
    Config(String),
}

impl From<spin1fw_core::error::Error> for Failure {
    fn from(e: spin1fw_core::error::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Config(e)
    }
}

fn emit(output: &Output, text: &str) -> Result<(), Failure> {
    match &output.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Spectrum(a) => emit(&a.output, &commands::spectrum(&a)?),
        Command::Stationary(a) => emit(&a.output, &commands::stationary(&a)?),
        Command::Evolve(a) => emit(&a.output, &commands::evolve(&a)?),
        Command::Verify(a) => {
            let report = verify::run(a.suite, &a.grids, a.timestamp)?;
            emit(&a.output, &format::json(&report))?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    let args = match config::expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
