use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dynkin::{run, Command, Options};

/// Values and optimal equilibria of competitive Dynkin games.
#[derive(Parser)]
#[command(name = "dynkin", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Comparison tolerance; overrides the file's `tolerance` [default: 1e-9]
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Print a JSON document instead of the text report
    #[arg(long, global = true)]
    machine: bool,
    /// Seed for randomized oracle searches
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the value and an optimal equilibrium
    Solve { path: PathBuf },
    /// Check the solver against exhaustive enumeration
    Verify { path: PathBuf },
    /// Test the weights for weak unilateral competitiveness
    Wuc { path: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, path) = match cli.command {
        Cmd::Solve { path } => (Command::Solve, path),
        Cmd::Verify { path } => (Command::Verify, path),
        Cmd::Wuc { path } => (Command::Wuc, path),
    };
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let opts = Options {
        tolerance: cli.tolerance,
        machine: cli.machine,
        seed: cli.seed,
    };
    match run(command, &text, &opts) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.output.as_bytes());
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(e.exit_code())
        }
    }
}
