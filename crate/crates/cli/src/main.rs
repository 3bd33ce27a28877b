//! `ewens-pitman`: exact distribution, deviation asymptotics, diversity law
//! and simulation of the number of types `K_n`, as CSV or JSON tables.
//!
//! Exit status: 0 on success, 1 when a computation or validation check
//! fails, 2 on invalid usage. `EP_THREADS` caps the worker threads.

// `!(x > 0.0)` also rejects NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod grid;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::grid::Grid;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "ewens-pitman", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct ModelArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PmfMethod {
    Markov,
    Formula,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    LocalLdp,
    GlobalLdp,
    LocalMdp,
    GlobalMdp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FluctuationWhat {
    Density,
    Tail,
    TailAsymptotic,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact pmf of K_n by the Markov recursion and/or the Sibuya formula.
    Pmf {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "both")]
        method: PmfMethod,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Deviation estimates next to the exact pmf or tail.
    Deviations {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        /// Level k/n (value or start:stop:step), large-deviation regimes.
        #[arg(long)]
        x: Option<Grid>,
        /// Scaled level k/(n^α b_n^{1−α}), moderate-deviation regimes.
        #[arg(long)]
        y: Option<Grid>,
        /// Moderate-deviation scale b_n with 1 < b_n < n.
        #[arg(long)]
        bn: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Density and tail of the limiting diversity S = lim K_n/n^α.
    Fluctuation {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        what: FluctuationWhat,
        /// Density arguments (value or start:stop:step).
        #[arg(long)]
        s_grid: Option<Grid>,
        /// Tail thresholds (value or start:stop:step).
        #[arg(long)]
        x_grid: Option<Grid>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Seeded simulation of K_n.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        reps: u64,
        #[arg(long)]
        seed: u64,
        /// Add exact probabilities and the total variation distance.
        #[arg(long)]
        compare_exact: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run the cross-oracle check suite.
    Validate {
        /// Reduced grids.
        #[arg(long)]
        quick: bool,
        /// Negative control: scale every asymptotic estimate by 1 + DELTA.
        #[arg(long, value_name = "DELTA")]
        inject_fault: Option<f64>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(ewens_pitman::Error),
    Io(std::io::Error),
    ChecksFailed(usize),
}

impl From<ewens_pitman::Error> for CliError {
    fn from(e: ewens_pitman::Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("EP_THREADS") else {
        return Ok(());
    };
    let threads = raw
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("EP_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure {threads} threads: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Pmf {
            model,
            n,
            method,
            format,
        } => commands::pmf(model, n, method)?.write(format, &mut out)?,
        Command::Deviations {
            model,
            n,
            regime,
            x,
            y,
            bn,
            format,
        } => commands::deviations(model, n, regime, x, y, bn)?.write(format, &mut out)?,
        Command::Fluctuation {
            model,
            what,
            s_grid,
            x_grid,
            format,
        } => commands::fluctuation(model, what, s_grid, x_grid)?.write(format, &mut out)?,
        Command::Simulate {
            model,
            n,
            reps,
            seed,
            compare_exact,
            format,
        } => commands::simulate(model, n, reps, seed, compare_exact)?.write(format, &mut out)?,
        Command::Validate {
            quick,
            inject_fault,
        } => commands::validate(quick, inject_fault, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::ChecksFailed(n)) => {
            eprintln!("{n} check(s) failed");
            ExitCode::from(1)
        }
    }
}
