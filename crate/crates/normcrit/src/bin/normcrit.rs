//! Command-line front end: one subcommand per experiment, a config file
//! as the single source of truth, and `--out`/`--seed` overrides for
//! scripted runs. All real work lives in [`normcrit::run`]; this binary
//! only parses arguments, relays errors, and maps them to exit codes
//! (2 configuration, 3 no convergence, 4 level violation, 5 scan
//! violation).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand};

use normcrit::run::{run_subcommand, Subcommand};

#[derive(Parser)]
#[command(
    name = "normcrit",
    version,
    about = "Normalized solutions of a Sobolev-critical coupled Schr\u{f6}dinger system: \
             solvers, level-window checks and inequality scans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` experiment description.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory (overrides `output_dir` from the config).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for randomized scans (overrides `seed` from the config).
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Solve for the local minimizer inside the kinetic ball.
    SolveLocal(Common),
    /// Solve for the mountain-pass solution above the minimizer.
    SolveMp(Common),
    /// Tabulate bubble-norm asymptotics and their fitted decay rates.
    VerifyBubble(Common),
    /// Check the bubble-path maximum against the compactness window.
    VerifyGap(Common),
    /// Scan the supporting scalar inequalities for counterexamples.
    VerifyLemmas(Common),
    /// Track the minimizer as the coupling is swept toward zero.
    SweepNu(Common),
    /// Measure the Sobolev and Gagliardo-Nirenberg constants.
    Constants(Common),
}

impl Command {
    fn split(self) -> (Subcommand, Common) {
        match self {
            Command::SolveLocal(c) => (Subcommand::SolveLocal, c),
            Command::SolveMp(c) => (Subcommand::SolveMp, c),
            Command::VerifyBubble(c) => (Subcommand::VerifyBubble, c),
            Command::VerifyGap(c) => (Subcommand::VerifyGap, c),
            Command::VerifyLemmas(c) => (Subcommand::VerifyLemmas, c),
            Command::SweepNu(c) => (Subcommand::SweepNu, c),
            Command::Constants(c) => (Subcommand::Constants, c),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (sub, common) = cli.command.split();
    match run_subcommand(sub, &common.config, common.out.as_deref(), common.seed) {
        Ok(outcome) => {
            println!(
                "{}: {} ({} artifact{}, {:.1}s) -> {}",
                outcome.manifest.subcommand,
                outcome.manifest.status,
                outcome.manifest.artifacts.len(),
                if outcome.manifest.artifacts.len() == 1 { "" } else { "s" },
                outcome.manifest.wall_seconds,
                outcome.manifest_path.display()
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
