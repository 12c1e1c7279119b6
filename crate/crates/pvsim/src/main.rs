use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pvsim::runner::{self, SweepOptions};
use pvsim::RunConfig;

#[derive(Parser)]
#[command(name = "pvsim", version, about = "Residential PV + storage techno-economic sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario of a configuration and write the CSV reports.
    Simulate {
        /// Run configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of parallel workers (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Emit a per-step dispatch trace for this 1-based year.
        #[arg(long)]
        trace_year: Option<u32>,
    },
    /// Check a configuration and its profiles without running the sweep.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_CONFIG_ERROR: u8 = 1;
const EXIT_RUNTIME_ERROR: u8 = 2;

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Simulate {
            config,
            out,
            jobs,
            trace_year,
        } => {
            // config, profile and matrix problems are config errors (exit 1);
            // only failures past this point count as runtime errors (exit 2)
            let cfg = match RunConfig::load(&config).and_then(|cfg| {
                let sites = runner::load_sites(&cfg)?;
                runner::expand_matrix(&cfg, &sites)?;
                Ok(cfg)
            }) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG_ERROR);
                }
            };
            let opts = SweepOptions {
                output_dir: out,
                jobs,
                trace_year,
            };
            match runner::run_sweep(&cfg, &opts) {
                Ok(outcome) => {
                    println!(
                        "{} scenarios -> {}",
                        outcome.scenario_count,
                        outcome.results_path.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_RUNTIME_ERROR)
                }
            }
        }
        Command::Validate { config } => match validate(&config) {
            Ok(count) => {
                println!("ok: {} scenarios resolvable", count);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG_ERROR)
            }
        },
    }
}

/// Schema, reference and profile checks only; no simulation.
fn validate(config: &Path) -> pvsim::Result<usize> {
    let cfg = RunConfig::load(config)?;
    let sites = runner::load_sites(&cfg)?;
    let scenarios = runner::expand_matrix(&cfg, &sites)?;
    Ok(scenarios.len())
}
