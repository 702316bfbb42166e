//! `noma-outage`: outage probability of uplink power-domain NOMA with SIC.
//!
//! Exit codes: 0 success, 1 validation failure, 2 input error, 3 numeric-domain
//! error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "noma-outage", version, about = "Outage probability of uplink power-domain NOMA with SIC")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    /// Published general-n expression, (n-1)! factor included.
    Paper,
    /// Same expression without the (n-1)! factor.
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Closed,
    Quad,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    /// Independent per-UE received powers, ordered afterwards.
    Pair,
    /// Rank channel draws first, then assign powers (SNRs) by rank.
    Protocol,
}

#[derive(Debug, clap::Args)]
pub struct McArgs {
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; the estimate does not depend on this.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the outage probability of one scenario file.
    Outage {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Corrected)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
        method: MethodArg,
        /// Simulation model for `--method mc`.
        #[arg(long, value_enum, default_value_t = ModelArg::Pair)]
        model: ModelArg,
        /// Absolute tolerance for `--method quad`.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Write a parameter sweep as CSV: a preset (`fig1`, `fig2`) or a sweep file.
    Sweep {
        /// `fig1`, `fig2`, or the path of a sweep file.
        source: String,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check every method on randomized instances.
    Validate {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        /// Also write the report as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        mc: McArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Outage { scenario, variant, method, model, tol, mc } => {
            commands::outage(&scenario, variant, method, model, tol, &mc)
        }
        Command::Sweep { source, out } => commands::sweep(&source, out.as_deref()),
        Command::Validate { instances, out, mc } => commands::validate(instances, out.as_deref(), &mc),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
