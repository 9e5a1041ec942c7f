//! `pta`: analysis and simulation of prescribed-time attractive LTV systems.

use clap::{Parser, Subcommand};
use pta_cli::config::{self, FlagOverrides};
use pta_cli::{commands, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pta",
    version,
    about = "Prescribed-time LTV systems: simulation, attractivity analysis, and switching control",
    after_help = "Exit codes: 0 success, 2 config error, 3 numeric error."
)]
struct Cli {
    /// Scenario configuration (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for emitted files (default: current directory).
    #[arg(long, global = true, value_name = "PATH")]
    output_dir: Option<PathBuf>,
    /// Grid points for traces and window scans.
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,
    /// Seed for randomized scenario draws.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Override any config field (dotted path), e.g. --set params.tau=5.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a catalog system (switched closed loop when sigma is set)
    /// and write trajectory.csv.
    Simulate,
    /// Run the flagged analyses and write report.json (and eigtrace.csv).
    Analyze,
    /// Run the built-in fourth-order scenario end to end and write
    /// eigtrace.csv, trajectory.csv, report.json, and fig1.svg.
    ReproduceExample,
    /// List the built-in systems.
    Catalog,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let flags = FlagOverrides {
        output_dir: cli.output_dir.clone(),
        grid: cli.grid,
        seed: cli.seed,
        sets: cli.sets.clone(),
    };
    match cli.command {
        Command::Simulate => {
            let path = cli.config.as_deref().ok_or_else(|| {
                CliError::Config("simulate requires --config (or --set overrides on top of one)".into())
            })?;
            let resolved = config::load(Some(path), &flags)?;
            commands::cmd_simulate(&resolved)
        }
        Command::Analyze => {
            let path = cli.config.as_deref().ok_or_else(|| {
                CliError::Config("analyze requires --config (or --set overrides on top of one)".into())
            })?;
            let resolved = config::load(Some(path), &flags)?;
            commands::cmd_analyze(&resolved)
        }
        Command::ReproduceExample => commands::cmd_reproduce_example(cli.output_dir.as_deref()),
        Command::Catalog => commands::cmd_catalog(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            if matches!(err, CliError::Numeric { .. }) {
                eprintln!("{}", err.verdict_json());
            }
            ExitCode::from(err.exit_code())
        }
    }
}
