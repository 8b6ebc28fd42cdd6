//! The JSON envelope shared by every subcommand.

use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

/// JSON Schema (draft 2020-12) for [`Envelope`].
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
    UsageError,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
            Outcome::UsageError => 64,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Every flag of the run, defaults included.
    pub config: Value,
    pub seed: u64,
    /// Value of `RUST_LOG`, the only setting read from the environment.
    pub log_level: Option<String>,
    pub wall_clock_ms: f64,
    pub outcome: Outcome,
    pub exit_code: i32,
    pub error: Option<String>,
    pub report: Value,
}

impl Envelope {
    pub fn new(command: &str, config: Value, seed: u64, elapsed: Duration, outcome: Outcome, error: Option<String>, report: Value) -> Self {
        Envelope {
            tool: "cgt",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            seed,
            log_level: std::env::var("RUST_LOG").ok(),
            wall_clock_ms: elapsed.as_secs_f64() * 1e3,
            outcome,
            exit_code: outcome.exit_code(),
            error,
            report,
        }
    }
}
