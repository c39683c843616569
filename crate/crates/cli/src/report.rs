use std::path::{Path, PathBuf};
use std::time::Instant;

use gck_core::Tolerances;
use serde::Serialize;

/// One named check with the quantity it was decided on.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
            margin: None,
            threshold: None,
            detail: None,
        }
    }

    /// Passes when `margin ≤ threshold`.
    pub fn at_most(name: impl Into<String>, margin: f64, threshold: f64) -> Self {
        Check {
            margin: Some(margin),
            threshold: Some(threshold),
            ..Check::new(name, margin <= threshold)
        }
    }

    /// Passes when `margin ≥ threshold`.
    pub fn at_least(name: impl Into<String>, margin: f64, threshold: f64) -> Self {
        Check {
            margin: Some(margin),
            threshold: Some(threshold),
            ..Check::new(name, margin >= threshold)
        }
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Machine-readable outcome of one subcommand. The same keys appear for
/// every subcommand; `data` carries the subcommand-specific payload.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub threads: usize,
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub wall_clock_seconds: f64,
    pub artifacts: Vec<PathBuf>,
    pub data: serde_json::Value,
}

pub struct ReportBuilder {
    started: Instant,
    report: RunReport,
}

impl ReportBuilder {
    pub fn new(subcommand: &str, parameters: serde_json::Value, seed: u64, threads: usize) -> Self {
        ReportBuilder {
            started: Instant::now(),
            report: RunReport {
                command: std::env::args().collect(),
                subcommand: subcommand.to_string(),
                parameters,
                seed,
                threads,
                tolerances: Tolerances::default(),
                checks: Vec::new(),
                passed: false,
                wall_clock_seconds: 0.0,
                artifacts: Vec::new(),
                data: serde_json::Value::Null,
            },
        }
    }

    pub fn check(&mut self, c: Check) {
        self.report.checks.push(c);
    }

    pub fn artifact(&mut self, path: &Path) {
        self.report.artifacts.push(path.to_path_buf());
    }

    pub fn data(&mut self, data: serde_json::Value) {
        self.report.data = data;
    }

    pub fn finish(mut self) -> RunReport {
        self.report.passed = !self.report.checks.is_empty() && self.report.checks.iter().all(|c| c.passed);
        self.report.wall_clock_seconds = self.started.elapsed().as_secs_f64();
        self.report
    }
}
