//! `bathsim`: reproduce non-Hermitian photonic dynamics inside fully
//! Hermitian waveguide networks, scenario by scenario.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical-bound failure
//! (lindblad-compare), 3 internal error.

mod config;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bathsim::Error;
use config::{ResolvedConfig, Scenario};

#[derive(Parser)]
#[command(
    name = "bathsim",
    about = "Simulate non-Hermitian quantum dynamics in Hermitian tight-binding networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a star-graph bath, reduce it to a chain, export the table
    SynthBath(RunArgs),
    /// Single site + bath: intensity trace and fitted decay rate
    Decay(RunArgs),
    /// PT dimer via bath: subsystem traces and transfer lengths
    Dimer(RunArgs),
    /// Two-photon evolution: post-selected probabilities and entanglement
    TwoPhoton(RunArgs),
    /// Post-selected network vs Lindblad master equation, side by side
    LindbladCompare(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output data file (defaults to a per-scenario name)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run even when the z range exceeds the bath truncation safety length
    #[arg(long)]
    override_lmax: bool,
    /// Suppress the stdout summary
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not errors; everything else is a
            // validation failure.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let (scenario, args) = match cli.command {
        Command::SynthBath(a) => (Scenario::SynthBath, a),
        Command::Decay(a) => (Scenario::Decay, a),
        Command::Dimer(a) => (Scenario::Dimer, a),
        Command::TwoPhoton(a) => (Scenario::TwoPhoton, a),
        Command::LindbladCompare(a) => (Scenario::LindbladCompare, a),
    };
    match execute(scenario, &args) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Invalid(_) | Error::Parse { .. } => 1,
                Error::Numerical(_) | Error::Io(_) => 3,
            })
        }
    }
}

fn execute(scenario: Scenario, args: &RunArgs) -> bathsim::Result<u8> {
    let cfg = ResolvedConfig::parse_file(scenario, args.config.as_deref(), args.out.clone())?;
    scenario::run(&cfg, args.override_lmax, args.quiet)
}
