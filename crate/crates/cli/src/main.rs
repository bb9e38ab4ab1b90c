use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

mod commands;
mod config;
mod report;

use config::{Command, RunConfig, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] bandlattice::Error),
}

/// Bandlimited lattice field theory: reconstructions, dispersion, conservation
/// checks and continuous translations.
#[derive(Debug, Parser)]
#[command(name = "bandlattice", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON file with any of the option names as keys (underscored)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

const EXIT_TOLERANCE: u8 = 1;
const EXIT_INVALID: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let config = match RunConfig::resolve(cli.command, cli.settings, cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    match commands::run(&config) {
        Ok(report) => {
            report.print();
            println!("outputs written to {}", config.out.display());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_TOLERANCE)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
