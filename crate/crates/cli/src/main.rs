use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rch_cli::{commands, CliError, Options, Outcome, ScenarioConfig};

const AFTER_HELP: &str = "\
Exit codes: 0 check passed, 1 check failed or numerical error, 2 config error, 3 I/O error.

trajectory.csv columns: t, pi1..pi3, gamma1..gamma3 (heavy tops), rotor angles
(alpha1..alpha3 or theta1..theta2), l1..lk, energy, then the Casimirs
(pi_sq, or pi_dot_gamma and gamma_sq).";

#[derive(Parser)]
#[command(name = "rch", version, about = "Controlled Hamiltonian systems on SO(3) and SE(3)", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "./out")]
    out: PathBuf,
    /// Seed; defaults to `run.seed` from the config, or 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the reduced system and report invariant drift.
    Simulate(Common),
    /// Evaluate closedness and Hamilton-Jacobi residuals of a section.
    HjCheck(Common),
    /// Compare the matched rigid body with its target system.
    EquivalenceDemo(Common),
    /// Check antisymmetry, Leibniz, Jacobi and Casimirs of the brackets.
    BracketVerify {
        #[command(flatten)]
        common: Common,
        /// Flip the sign of the translational part of the se(3) bracket.
        #[arg(long, hide = true)]
        inject_sign_error: bool,
    },
}

type Handler = fn(&ScenarioConfig, &Options) -> Result<Outcome, CliError>;

fn run(cli: Cli) -> Result<(Outcome, bool), CliError> {
    let (common, f, inject): (Common, Handler, bool) = match cli.command {
        Command::Simulate(c) => (c, commands::simulate, false),
        Command::HjCheck(c) => (c, commands::hj_check, false),
        Command::EquivalenceDemo(c) => (c, commands::equivalence_demo, false),
        Command::BracketVerify { common, inject_sign_error } => (common, commands::bracket_verify, inject_sign_error),
    };
    let cfg = ScenarioConfig::load(&common.config)?;
    let opts = Options { out: common.out, seed: common.seed, inject_sign_error: inject };
    Ok((f(&cfg, &opts)?, common.quiet))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((outcome, quiet)) => {
            if !quiet || !outcome.passed {
                println!("{}", outcome.summary);
            }
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
