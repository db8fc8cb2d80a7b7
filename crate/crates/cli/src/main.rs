//! `rankdir`: fit rank-based direction estimators on CSV data, run the
//! simulation presets, compute confidence intervals and run the
//! verification suite.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure,
//! 5 failed check.

mod commands;
mod data;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rankdir::{Error, Method};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    UnknownColumn(String),
    Data(String),
    Numerical(String),
    CheckFailed(Vec<String>),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::UnknownColumn(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::CheckFailed(_) => 5,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m)
            | CliError::UnknownColumn(m)
            | CliError::Data(m)
            | CliError::Numerical(m) => m.clone(),
            CliError::CheckFailed(names) => format!("failed checks: {}", names.join(", ")),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidConfig(_) => CliError::Usage(msg),
            Error::EmptyInput
            | Error::GroupTooSmall { .. }
            | Error::DegenerateRanks
            | Error::ConstantCovariate { .. }
            | Error::MissingResponses
            | Error::InvalidInput(_)
            | Error::SampleTooLarge { .. } => CliError::Data(msg),
            Error::Domain(_)
            | Error::SingularDesign
            | Error::ZeroVector
            | Error::AngleUndefined
            | Error::NotPositiveDefinite
            | Error::TooManyFailures { .. }
            | Error::LeaveOutFailed { .. } => CliError::Numerical(msg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rankdir", version, about = "Direction estimation from response ranks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit one estimator to a CSV file.
    Fit(FitArgs),
    /// Run a simulation preset or scenario file and summarise it.
    Simulate(SimulateArgs),
    /// Confidence intervals for the fitted direction.
    Ci(CiArgs),
    /// Run the numerical verification suite.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Gqr,
    Tgqr,
    Eqr,
    Spearmax,
    Ols,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Gqr => Method::Gqr,
            MethodArg::Tgqr => Method::Tgqr,
            MethodArg::Eqr => Method::Eqr,
            MethodArg::Spearmax => Method::Spearmax,
            MethodArg::Ols => Method::Ols,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CiArg {
    Bootstrap,
    Jackknife,
    JackknifeBc,
    PercentileJackknife,
    Studentized,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Response column.
    #[arg(long)]
    response: String,
    /// Covariate columns, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    covariates: Vec<String>,
    /// Rank the response separately within each value of this column.
    #[arg(long)]
    group: Option<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Tgqr)]
    method: MethodArg,
    /// Fit without an intercept column.
    #[arg(long)]
    no_intercept: bool,
    /// Seed for Spearmax restarts and resampling.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
}

#[derive(Debug, Args)]
struct CiArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long = "ci", value_enum, default_value_t = CiArg::Bootstrap)]
    ci: CiArg,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 1000)]
    replicates: usize,
    #[arg(long, default_value_t = 0.95, value_parser = parse_level)]
    level: f64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Preset name (gaussian_grid, skew_sweep, stability_sweep) or path to a
    /// scenario TOML file.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    scenario: Option<String>,
    /// Scenario TOML file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the number of trials per sweep point.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Summary CSV; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write one row per trial and method to this CSV.
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// CSV report; standard output when omitted. The text report goes to
    /// standard error.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Scale every target identity by this factor (negative control).
    #[arg(long, default_value_t = 1.0, hide = true)]
    perturb: f64,
}

fn parse_level(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("level must lie in (0, 1), got {v}"))
    }
}

/// The invocation as recorded in output headers, without the program path.
fn command_line() -> String {
    let mut parts = vec!["rankdir".to_string()];
    parts.extend(std::env::args().skip(1));
    parts.join(" ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => commands::fit(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Ci(a) => commands::ci(&a),
        Command::Check(a) => commands::check(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
