//! The `quenchsim` command line.
//!
//! `quenchsim <mode> [flags]` runs one mode and writes a CSV or JSON file
//! (or stdout). Exit codes: 0 success, 1 I/O failure, 2 configuration error,
//! 3 unstable magnon mode, 4 truncation overflow, 5 degenerate likelihood.
//! Failures print one JSON record to stderr.

use std::path::PathBuf;

use clap::Parser;
use serde_json::json;
use thiserror::Error;

use crate::adaptive::AdaptiveError;
use crate::dynamics::DynamicsError;
use crate::inference::InferenceError;
use crate::model::{ParamError, StabilityError};
use crate::squeezed::SqueezeError;

pub mod config;
pub mod emit;
pub mod run;

pub use config::{load_layer, resolve, ConfigLayer, Format, Mode, Resolved};
pub use run::execute;

#[derive(Debug, Parser)]
#[command(name = "quenchsim", version, about = "Qubit-conditioned magnon quench metrology simulator")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[arg(value_enum)]
    pub mode: Mode,
    /// JSON config file, or any earlier output file (its embedded meta is reused)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub layer: ConfigLayer,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Squeeze(#[from] SqueezeError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl From<AdaptiveError> for CliError {
    fn from(e: AdaptiveError) -> Self {
        match e {
            AdaptiveError::Squeeze(e) => CliError::Squeeze(e),
            AdaptiveError::Inference(e) => CliError::Inference(e),
            AdaptiveError::InvalidConfig(msg) => CliError::Config(vec![msg]),
            AdaptiveError::FailedLocalization { .. } => {
                unreachable!("failed localization is reported as a result, not an error")
            }
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Stability(_) => 3,
            CliError::Squeeze(SqueezeError::TruncationOverflow { .. }) => 4,
            CliError::Inference(InferenceError::DegenerateLikelihood) => 5,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            1 => "io",
            3 => "stability",
            4 => "truncation_overflow",
            5 => "degenerate_likelihood",
            _ => "config",
        }
    }

    /// The machine-readable record printed to stderr.
    pub fn record(&self) -> serde_json::Value {
        let details = match self {
            CliError::Config(errs) => json!(errs),
            CliError::Stability(e) => json!({"branch": e.branch, "margin_radns": e.margin}),
            CliError::Squeeze(SqueezeError::TruncationOverflow { r, tail_tol, cap }) => {
                json!({"r": r, "tail_tol": tail_tol, "cap": cap})
            }
            _ => serde_json::Value::Null,
        };
        json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
            "details": details,
        })
    }
}

/// Runs the parsed command line and returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match run_cli(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}

fn run_cli(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.config {
        Some(path) => load_layer(path)?,
        None => ConfigLayer::default(),
    };
    let mut layer = base.overlay(cli.layer);
    if layer.format.is_none() && cli.out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "json")) {
        layer.format = Some(Format::Json);
    }
    let resolved = resolve(cli.mode, layer)?;
    let (content, notice) = execute(&resolved)?;
    emit::write_output(cli.out.as_deref(), &content)?;
    if let Some(notice) = notice {
        eprintln!("{notice}");
    }
    Ok(())
}
