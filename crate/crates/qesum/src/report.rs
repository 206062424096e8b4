//! The report envelope every CLI command emits: tool version, an echo of the
//! resolved configuration, the seed, wall time, and the command's results.
//! Keys are sorted on serialization, so identical runs produce byte-identical
//! bodies apart from the `timestamp` object.

use serde::Serialize;
use serde_json::Value;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: "qesum",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// The only volatile part of a report, kept in one object so consumers can
/// drop a single key when diffing runs.
#[derive(Debug, Clone, Serialize)]
pub struct Timestamp {
    /// Start of the run, milliseconds since the Unix epoch.
    pub started: u128,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    /// Echo of the resolved run configuration.
    pub config: Value,
    pub seed: Option<u64>,
    pub timestamp: Timestamp,
    pub results: Value,
    /// True iff some verified claim failed; drives exit code 1.
    pub failed: bool,
}

impl Report {
    /// Pretty JSON with sorted keys at every level.
    pub fn to_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&value)?)
    }
}

/// Captures the start time, then stamps the finished report.
pub struct ReportBuilder {
    config: Value,
    seed: Option<u64>,
    started: u128,
    clock: Instant,
}

impl ReportBuilder {
    pub fn new(config: Value) -> Self {
        let started = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);
        ReportBuilder {
            config,
            seed: None,
            started,
            clock: Instant::now(),
        }
    }

    pub fn seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    /// Replaces the config echo (for callers that only know it after the
    /// clock has started).
    pub fn with_config(mut self, config: Value) -> Self {
        self.config = config;
        self
    }

    pub fn finish(self, results: Value, failed: bool) -> Report {
        Report {
            tool: ToolInfo::default(),
            config: self.config,
            seed: self.seed,
            timestamp: Timestamp {
                started: self.started,
                wall_seconds: self.clock.elapsed().as_secs_f64(),
            },
            results,
            failed,
        }
    }
}

/// Serializes anything with sorted keys (single line).
pub fn sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string(&v)?)
}
