//! Runs experiment configs against the dilatation models and writes CSV reports.

pub mod codec;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::commands::{execute, Outcome};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{render, Table};

pub use crate::error::CliError as Error;

/// Exit status for a passing run.
pub const EXIT_PASS: i32 = 0;
/// Exit status for a malformed config, a bad model or an i/o failure.
pub const EXIT_ERROR: i32 = 1;
/// Exit status for a failing verdict or a numerical finding.
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub quiet: bool,
}

/// The rendered report and the exit status it implies.
#[derive(Debug, Clone)]
pub struct Report {
    pub bytes: Vec<u8>,
    pub status: i32,
    pub destination: Option<PathBuf>,
}

/// Parses and runs one config text. Errors that are numerical findings are
/// folded into a failing report.
pub fn run_text(text: &str, seed: Option<u64>) -> Result<(ExperimentConfig, Report), CliError> {
    let cfg = ExperimentConfig::parse(text, seed)?;
    let model = cfg.model.build().map_err(|e| CliError::Model(e.to_string()))?;
    let (outcome, status) = match execute(&model, &cfg.command) {
        Ok(o) => {
            let status = if o.passed { EXIT_PASS } else { EXIT_FAIL };
            (o, status)
        }
        Err(e) if e.is_finding() => {
            let mut table = Table::new(&["status", "error"]);
            table.push(vec!["finding".into(), e.to_string()]);
            (Outcome { table, passed: false, notes: Vec::new() }, EXIT_FAIL)
        }
        Err(CliError::Lab(e @ dilatation_core::LabError::InvalidArgument(_))) => {
            return Err(CliError::Config(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    let mut meta = vec![
        ("model".to_string(), model.name()),
        ("command".to_string(), cfg.command.name().to_string()),
        ("seed".to_string(), cfg.command.seed().map_or_else(|| "none".into(), |s| s.to_string())),
        ("verdict".to_string(), if status == EXIT_PASS { "pass" } else { "fail" }.to_string()),
        ("tool".to_string(), format!("dilatation-lab {}", env!("CARGO_PKG_VERSION"))),
        ("config_sha256".to_string(), hex::encode(Sha256::digest(cfg.canonical.as_bytes()))),
    ];
    meta.extend(outcome.notes);
    let bytes = render(&outcome.table, &meta)?;
    let destination = cfg.output.clone();
    Ok((cfg, Report { bytes, status, destination }))
}

/// Runs a config file and writes its report; returns the process exit code.
pub fn run(opts: &RunOptions) -> i32 {
    match run_inner(opts) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("dilatation-lab: {e}");
            EXIT_ERROR
        }
    }
}

fn run_inner(opts: &RunOptions) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&opts.config)?;
    let (_, report) = run_text(&text, opts.seed)?;
    match opts.out.clone().or(report.destination) {
        Some(path) => std::fs::write(path, &report.bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&report.bytes)?;
        }
    }
    if !opts.quiet {
        let verdict = if report.status == EXIT_PASS { "pass" } else { "fail" };
        eprintln!("dilatation-lab: {verdict}");
    }
    Ok(report.status)
}
