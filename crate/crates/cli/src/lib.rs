//! Configuration-driven runs of the `nhskin` models with CSV and JSON output.

pub mod config;
pub mod models;
pub mod output;
pub mod tasks;

use std::fmt;
use std::path::Path;

use anyhow::Result;

pub use config::{RunConfig, Task};

/// Closed form and dense matrix disagree beyond the tolerance.
#[derive(Debug)]
pub struct ValidationFailure {
    pub max_distance: f64,
    pub tolerance: f64,
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "validation failure: max distance {:e} exceeds tolerance {:e}",
            self.max_distance, self.tolerance
        )
    }
}

impl std::error::Error for ValidationFailure {}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub tolerance: f64,
    pub seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tolerance: 1e-7,
            seed: None,
        }
    }
}

fn seed(cfg: &RunConfig, opts: &RunOptions) -> u64 {
    opts.seed.or(cfg.seed).unwrap_or(0)
}

/// Validation report; errors with [`ValidationFailure`] when it fails.
pub fn validate(cfg: &RunConfig, opts: &RunOptions) -> Result<serde_json::Value> {
    let report = tasks::validate(cfg, opts.tolerance, seed(cfg, opts))?;
    if report["pass"] != serde_json::Value::Bool(true) {
        return Err(ValidationFailure {
            max_distance: report["max_distance"].as_f64().unwrap_or(f64::NAN),
            tolerance: opts.tolerance,
        }
        .into());
    }
    Ok(report)
}

/// Validates at reduced size, runs `task` and writes the outputs under `out`.
pub fn run(cfg: &RunConfig, task: Task, out: &Path, stem: &str, opts: &RunOptions) -> Result<Vec<String>> {
    let report = validate(cfg, opts)?;
    let mut outcome = tasks::run_task(cfg, task)?;
    outcome.sidecar.insert("validation".into(), report);
    outcome.sidecar.insert("seed".into(), serde_json::json!(seed(cfg, opts)));
    output::write_outcome(out, stem, &outcome)
}
