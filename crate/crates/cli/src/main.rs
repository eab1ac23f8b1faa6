//! Batch driver: one subcommand per experiment, JSON config in, CSV (or
//! a single JSON design) out. Exit codes: 0 success, 1 infeasible or an
//! infeasibility-dominated sweep, 2 any other error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use irsec_cli::{
    load_config, oracle_compare, render_csv, render_oracle_csv, run_design, sweep_distance,
    sweep_rate, CliError, SweepResult,
};
use irsec_core::config::ScenarioConfig;
use irsec_core::Error as CoreError;

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "irsec",
    version,
    about = "Minimum-power secure transmit design for a reflecting-surface wiretap link"
)]
struct Cli {
    /// JSON scenario file; omitted (or an empty file) means built-in defaults.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override the scenario's random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design one instance (trial 0) and print the result as JSON.
    Solve,
    /// Mean required power per target secrecy rate, as CSV.
    SweepRate {
        /// Comma-separated target rates in bits/s/Hz, strictly ascending.
        #[arg(
            long,
            value_delimiter = ',',
            default_values_t = [8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0]
        )]
        rates: Vec<f64>,
    },
    /// Mean required power per user y-position, as CSV.
    SweepDistance {
        /// Comma-separated user y-coordinates in meters.
        #[arg(
            long,
            value_delimiter = ',',
            default_values_t = [
                50.0, 60.0, 70.0, 80.0, 90.0, 100.0, 110.0, 120.0, 130.0, 140.0, 150.0
            ]
        )]
        positions: Vec<f64>,
    },
    /// Compare the shipped phase solvers against an exhaustive oracle (N <= 4).
    OracleCompare,
}

fn write_out(text: &str, out: &Option<PathBuf>) -> irsec_cli::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sweep_exit(res: &SweepResult) -> u8 {
    if res.overall_feasibility() < 0.5 {
        EXIT_INFEASIBLE
    } else {
        0
    }
}

fn run(cli: Cli) -> irsec_cli::Result<u8> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match cli.command {
        Command::Solve => match run_design(&cfg, cfg.target_rate_bits, 0) {
            Ok(design) => {
                let mut json = serde_json::to_string_pretty(&design)
                    .map_err(|e| CliError::Io(e.to_string()))?;
                json.push('\n');
                write_out(&json, &cli.out)?;
                Ok(0)
            }
            Err(CoreError::Infeasible) => {
                eprintln!(
                    "infeasible: the target secrecy rate is unreachable at any power \
                     for this channel"
                );
                Ok(EXIT_INFEASIBLE)
            }
            Err(other) => Err(other.into()),
        },
        Command::SweepRate { rates } => {
            let res = sweep_rate(&cfg, &rates)?;
            write_out(&render_csv(&res), &cli.out)?;
            Ok(sweep_exit(&res))
        }
        Command::SweepDistance { positions } => {
            let res = sweep_distance(&cfg, &positions)?;
            write_out(&render_csv(&res), &cli.out)?;
            Ok(sweep_exit(&res))
        }
        Command::OracleCompare => {
            let rep = oracle_compare(&cfg)?;
            write_out(&render_oracle_csv(&rep), &cli.out)?;
            eprintln!(
                "median relative gap vs oracle: pgd {:.3e}, sdp {:.3e}",
                rep.median_pgd_gap, rep.median_sdp_gap
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
