//! Command-line front end: every subcommand reads a TOML experiment config
//! and writes CSV/JSON artifacts.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use stratclass_core::harness::{self, Task};

#[derive(Parser)]
#[command(
    name = "stratclass",
    about = "Threshold policies against imitative strategic behavior",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize the (adjusted) strategic objective for one group.
    Optimize(ConfigArg),
    /// Sweep one preference weight and record the optimum per grid value.
    Sweep(ConfigArg),
    /// Two-group weight sweep with unfairness per grid value.
    Fairness(ConfigArg),
    /// Run the controlled-experiment parameter estimation pipeline.
    Estimate(ConfigArg),
    /// Emit the built-in Gaussian benchmark tables.
    ReproduceTables(ConfigArg),
    /// Repeat a weight sweep under noisy q or eps and aggregate rounds.
    NoiseSweep(ConfigArg),
    /// Fit score-table data and summarize the resulting scenario.
    IngestFico(ConfigArg),
    /// Dispatch on the `task` key inside the config file.
    Run(ConfigArg),
}

#[derive(clap::Args)]
struct ConfigArg {
    /// Path to the TOML experiment config.
    #[arg(short, long)]
    config: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config, task) = match cli.command {
        Command::Optimize(a) => (a.config, Some(Task::Optimize)),
        Command::Sweep(a) => (a.config, Some(Task::Sweep)),
        Command::Fairness(a) => (a.config, Some(Task::Fairness)),
        Command::Estimate(a) => (a.config, Some(Task::Estimate)),
        Command::ReproduceTables(a) => (a.config, Some(Task::ReproduceTables)),
        Command::NoiseSweep(a) => (a.config, Some(Task::NoiseSweep)),
        Command::IngestFico(a) => (a.config, Some(Task::IngestFico)),
        Command::Run(a) => (a.config, None),
    };
    match harness::run(&config, task) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
