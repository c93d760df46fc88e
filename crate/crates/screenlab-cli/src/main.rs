//! `screenlab`: screen CSV datasets for active variables, run seeded
//! coverage-rate benchmarks, generate test-function data, and compute
//! closed-form affine coefficients and design diagnostics.

mod commands;
mod dataset;

use clap::{Parser, Subcommand};
use screenlab::bla::BlaError;
use screenlab::core::CoreError;
use screenlab::diagnostics::DiagnosticsError;
use screenlab::experiments::ExperimentError;
use screenlab::sampling::SamplingError;
use screenlab::screeners::ScreenerError;
use screenlab::testbed::TestbedError;

/// Exit code 2 for unusable input (files, flags, configs); exit code 3 when
/// the numerics fail on input that parsed and validated.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<BlaError> for CliError {
    fn from(e: BlaError) -> Self {
        match e {
            BlaError::SingularGram | BlaError::NonFiniteEvaluation => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ScreenerError> for CliError {
    fn from(e: ScreenerError) -> Self {
        match &e {
            ScreenerError::NoConvergence { .. } => CliError::Numeric(e.to_string()),
            ScreenerError::Fit(BlaError::SingularGram | BlaError::NonFiniteEvaluation) => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match &e {
            ExperimentError::RepFailed { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<DiagnosticsError> for CliError {
    fn from(e: DiagnosticsError) -> Self {
        match &e {
            DiagnosticsError::ZeroVariance => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<TestbedError> for CliError {
    fn from(e: TestbedError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SamplingError> for CliError {
    fn from(e: SamplingError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "screenlab",
    version,
    about = "Variable screening for computer experiments with more inputs than runs"
)]
struct Cli {
    /// Cap the worker-thread pool (default: one thread per core).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select active variables from a CSV dataset.
    Screen(commands::ScreenArgs),
    /// Run a seeded coverage-rate benchmark from a TOML config.
    Bench(commands::BenchArgs),
    /// Sample a built-in test function into a CSV dataset.
    Generate(commands::GenerateArgs),
    /// Closed-form best-affine coefficients of a test function.
    Bla(commands::BlaArgs),
    /// Exact star discrepancy of a small point set.
    Discrepancy(commands::DiscrepancyArgs),
    /// Pick-freeze Sobol sensitivity indices of a test function.
    Sobol(commands::SobolArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(k) = cli.workers {
        if k == 0 {
            return Err(CliError::Input("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Input(format!("worker pool: {e}")))?;
    }
    match cli.command {
        Command::Screen(args) => commands::screen(&args),
        Command::Bench(args) => commands::bench(&args),
        Command::Generate(args) => commands::generate(&args),
        Command::Bla(args) => commands::bla(&args),
        Command::Discrepancy(args) => commands::discrepancy(&args),
        Command::Sobol(args) => commands::sobol(&args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}
