use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use forestplan_cli::commands::{self, Io, EXIT_OK, EXIT_USAGE};

/// Age-structured forest planning and companion demonstrations.
#[derive(Debug, Parser)]
#[command(name = "forestplan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a scenario (or a directory of scenarios) for the optimal plan.
    Plan {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Roll a fixed policy forward and check every constraint.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Policy JSON, or a trajectory.csv written by `plan`.
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Majority aggregation of the generalized Condorcet profile.
    Condorcet {
        #[arg(long)]
        n: usize,
    },
    /// Entropy in bits of a discrete distribution.
    Entropy {
        #[arg(required = true, allow_negative_numbers = true)]
        probs: Vec<f64>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            std::process::exit(code);
        }
    };
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    let mut io = Io {
        out: &mut out,
        err: &mut err,
    };
    let code = match cli.command {
        Command::Plan { scenario, out } => commands::cmd_plan(&scenario, &out, &mut io),
        Command::Simulate {
            scenario,
            policy,
            out,
        } => commands::cmd_simulate(&scenario, &policy, &out, &mut io),
        Command::Condorcet { n } => commands::cmd_condorcet(n, &mut io),
        Command::Entropy { probs } => commands::cmd_entropy(&probs, &mut io),
    };
    std::process::exit(code);
}
