//! Command layer for the `qca` binary: configuration, the six commands and
//! their reports.

mod commands;
mod config;

pub use commands::{dirac_mass_ratio, random_directions, run, CONTINUUM_SCALES, DEFAULT_COUPLINGS};
pub use config::{DiracConfig, EvolveConfig, LatticeConfig, Model, PacketConfig, RunConfig, SolutionConfig, SpectrumConfig};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] qca_core::Error),
}

impl CliError {
    /// Invalid parameters are configuration errors; numerical failures are validation failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(qca_core::Error::InvalidParameter(_) | qca_core::Error::InvalidLatticeSide(_)) => 2,
            CliError::Core(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Derive,
    Verify,
    Spectrum,
    Evolve,
    Limit,
    Dirac,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Derive => "derive",
            Command::Verify => "verify",
            Command::Spectrum => "spectrum",
            Command::Evolve => "evolve",
            Command::Limit => "limit",
            Command::Dirac => "dirac",
        }
    }
}

/// A labelled value, optionally checked against a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub label: String,
    pub value: f64,
    pub bound: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    /// Conjunction of every entry's `pass`.
    pub pass: bool,
    pub entries: Vec<ReportEntry>,
    pub artifact_paths: Vec<PathBuf>,
}

impl Report {
    pub fn new(command: Command) -> Self {
        Report { command: command.name().into(), pass: true, entries: Vec::new(), artifact_paths: Vec::new() }
    }

    /// Informational entry; always passes.
    pub fn info(&mut self, label: impl Into<String>, value: f64) {
        self.entries.push(ReportEntry { label: label.into(), value, bound: None, pass: true });
    }

    /// Passes iff `value ≤ bound`.
    pub fn at_most(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        self.check(label, value, bound, value <= bound);
    }

    pub fn equals(&mut self, label: impl Into<String>, value: usize, expected: usize) {
        self.check(label, value as f64, expected as f64, value == expected);
    }

    pub fn check(&mut self, label: impl Into<String>, value: f64, bound: f64, pass: bool) {
        self.pass &= pass;
        self.entries.push(ReportEntry { label: label.into(), value, bound: Some(bound), pass });
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn get(&self, label: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.label == label)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.entries.iter().map(|e| e.label.len()).max().unwrap_or(5).max(5);
        writeln!(f, "{}: {}", self.command, if self.pass { "PASS" } else { "FAIL" })?;
        writeln!(f, "{:<width$}  {:>14}  {:>12}  status", "check", "value", "bound")?;
        for e in &self.entries {
            let bound = e.bound.map_or_else(|| "-".to_string(), |b| format!("{b:.3e}"));
            let status = match (e.bound, e.pass) {
                (None, _) => "",
                (_, true) => "ok",
                (_, false) => "FAIL",
            };
            writeln!(f, "{:<width$}  {:>14.6e}  {:>12}  {status}", e.label, e.value, bound)?;
        }
        for p in &self.artifact_paths {
            writeln!(f, "wrote {}", p.display())?;
        }
        Ok(())
    }
}
