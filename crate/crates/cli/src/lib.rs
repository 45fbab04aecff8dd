//! Command-line front end: index construction, model fitting, diagnostics,
//! simulation and fit comparison.

mod diagnose;
mod fit;
mod index;
mod report;
mod simulate;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use midasvol::{Drivers, Error, LagSpacing, ModelSpec, Span};

pub use diagnose::DiagnosticsReport;
pub use report::ComparisonReport;

#[derive(Debug, Parser)]
#[command(name = "midasvol", version, about = "GJR-GARCH-MIDAS volatility toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build eigenportfolio composite indices for groups of monthly series.
    ConstructIndex(index::IndexArgs),
    /// Fit a GJR-GARCH-MIDAS model to a daily price series.
    Fit(fit::FitArgs),
    /// Descriptive statistics and residual diagnostics of daily returns.
    Diagnose(diagnose::DiagnoseArgs),
    /// Simulate prices, a macro series and latent variance paths.
    Simulate(simulate::SimulateArgs),
    /// Compare several fit reports.
    Report(report::ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DriversArg {
    Rv,
    Mv,
    #[value(name = "rv+mv")]
    RvMv,
}

impl From<DriversArg> for Drivers {
    fn from(d: DriversArg) -> Self {
        match d {
            DriversArg::Rv => Drivers::Rv,
            DriversArg::Mv => Drivers::Mv,
            DriversArg::RvMv => Drivers::RvMv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpanArg {
    Fixed,
    Rolling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Day,
    Month,
}

/// Model selection flags shared by `fit` and `simulate`.
#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    #[arg(long, value_enum, default_value = "rv")]
    pub drivers: DriversArg,
    #[arg(long, value_enum, default_value = "rolling")]
    pub span: SpanArg,
    /// MIDAS lag order K.
    #[arg(long, default_value_t = 36)]
    pub lags: usize,
    /// Rolling window N' in trading days.
    #[arg(long, default_value_t = 22)]
    pub window: usize,
    #[arg(long, value_enum, default_value = "day")]
    pub lag_spacing: SpacingArg,
}

impl SpecArgs {
    pub fn spec(&self) -> ModelSpec {
        let mut s = ModelSpec::new(
            self.drivers.into(),
            match self.span {
                SpanArg::Fixed => Span::Fixed,
                SpanArg::Rolling => Span::Rolling,
            },
        );
        s.lags = self.lags;
        s.window = self.window;
        s.lag_spacing = match self.lag_spacing {
            SpacingArg::Day => LagSpacing::Day,
            SpacingArg::Month => LagSpacing::Month,
        };
        s
    }
}

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments or configuration.
    Usage,
    /// Unreadable or malformed input.
    Input,
    /// Numerical failure or non-convergence.
    Numeric,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 2,
            ErrorKind::Input => 3,
            ErrorKind::Numeric => 4,
        }
    }

    fn of(e: &Error) -> Self {
        match e {
            Error::Config(_) => ErrorKind::Usage,
            _ if e.is_input() => ErrorKind::Input,
            Error::Lookup(_)
            | Error::Coverage(_)
            | Error::Alignment(_)
            | Error::NonPositive { .. }
            | Error::Length { .. }
            | Error::Window { .. } => ErrorKind::Input,
            _ => ErrorKind::Numeric,
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Usage, message: message.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self { kind: ErrorKind::Input, message: format!("{}: {e}", path.display()) }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self { kind: ErrorKind::of(&e), message: e.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self { kind: ErrorKind::Input, message: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::ConstructIndex(a) => index::run(&a),
        Command::Fit(a) => fit::run(&a),
        Command::Diagnose(a) => diagnose::run(&a),
        Command::Simulate(a) => simulate::run(&a),
        Command::Report(a) => report::run(&a),
    }
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "series".into())
}

fn out_dir(out: &Option<PathBuf>) -> PathBuf {
    out.clone().unwrap_or_else(|| PathBuf::from("."))
}
