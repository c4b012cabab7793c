//! The `tollsub` command line: solve congestion games under tolls and
//! subsidies and regenerate the price-of-anarchy tables as CSV.
//!
//! [`run`] is the whole program with its output directed to a writer; the
//! binary passes standard output.

mod commands;
mod config;
mod ranges;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;

#[derive(Debug, Parser)]
#[command(name = "tollsub", version, about = "Tolls vs subsidies in non-atomic congestion games")]
struct Cli {
    /// TOML file with default values for any flag; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal flow, worst Nash flow found and PoA of one instance.
    Solve(InstanceArgs),
    /// PoA of each instance given and the largest among them, as CSV.
    Poa(InstanceArgs),
    /// Bounded tolls and subsidies on polynomial Pigou networks.
    Fig1(Fig1Args),
    /// Optimal bounded toll and subsidy: formulas against grid suprema.
    Fig2a(Fig2aArgs),
    /// Scaled marginal-cost toll and its nominally equivalent subsidy under
    /// two sensitivity classes.
    Fig2b(Fig2bArgs),
    /// Toll-versus-subsidy comparison over a parameter grid.
    Check(CheckArgs),
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// Randomised restarts per equilibrium search.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Seed for the randomised restarts.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Instance file (JSON); `poa` accepts several.
    #[arg(long)]
    pub instance: Vec<PathBuf>,
    /// Mechanism replacing the file's incentives, e.g. `mc` or `toll:β=0.5`.
    #[arg(long)]
    pub mech: Option<String>,
    /// Replace the sensitivity model by classes `sL` and `sU`.
    #[arg(long = "sL")]
    pub s_low: Option<f64>,
    #[arg(long = "sU")]
    pub s_high: Option<f64>,
    /// Mass of the `sL` class (default 0.5).
    #[arg(long)]
    pub mass_low: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    /// β values as start:stop:step (default 0:4:0.25).
    #[arg(long)]
    pub beta_grid: Option<String>,
    /// Highest polynomial degree, at most 6 (default 4).
    #[arg(long)]
    pub p_max: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Points per latency coefficient on [0, 2] (default 21).
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Mass splits between two classes (default 11).
    #[arg(long)]
    pub mass_splits: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Fig2aArgs {
    /// β values as start:stop:step (default 0:1:0.05).
    #[arg(long)]
    pub beta_grid: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Fig2bArgs {
    /// q = sL/sU values as start:stop:step (default 0.1:1:0.05).
    #[arg(long)]
    pub q_grid: Option<String>,
    /// Low sensitivity; the high one is sL/q (default 1).
    #[arg(long = "sL")]
    pub s_low: Option<f64>,
    /// Keep equilibria that leave a link unused.
    #[arg(long)]
    pub all_equilibria: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// 1: subsidy no worse than toll with homogeneous users.
    /// 2: subsidy no better than the equivalent toll with heterogeneity.
    #[arg(long)]
    pub theorem: Option<u8>,
    /// β values for theorem 1 (default 0.2:0.8:0.2).
    #[arg(long)]
    pub beta_grid: Option<String>,
    /// q values for theorem 2 (default 0.25:1:0.25).
    #[arg(long)]
    pub q_grid: Option<String>,
    /// Toll bound β⁺ for theorem 2 (default 0.5).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Smallest margin a theorem 1 row must show (default 0).
    #[arg(long)]
    pub min_margin: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub common: Common,
}

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
    Convergence(String),
    Violation(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Convergence(_) => 3,
            Failure::Violation(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Convergence(m) | Failure::Violation(m) => m,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(format!("output: {e}"))
    }
}

impl From<tollsub_core::Error> for Failure {
    fn from(e: tollsub_core::Error) -> Self {
        use tollsub_core::Error as E;
        let msg = e.to_string();
        match e {
            E::Parameter { .. } | E::Domain(_) => Failure::Usage(msg),
            E::Convergence(_) => Failure::Convergence(msg),
            _ => Failure::Input(msg),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Results go to `out`, diagnostics to standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = e.print();
                return 1;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let config = match &cli.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(m) => {
                eprintln!("error: {m}");
                return 1;
            }
        },
        None => ExperimentConfig::default(),
    };
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a, &config, out),
        Command::Poa(a) => commands::poa(a, &config, out),
        Command::Fig1(a) => commands::fig1(a, &config, out),
        Command::Fig2a(a) => commands::fig2a(a, &config, out),
        Command::Fig2b(a) => commands::fig2b(a, &config, out),
        Command::Check(a) => commands::check(a, &config, out),
    };
    let result = result.and_then(|()| Ok(out.flush()?));
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}
