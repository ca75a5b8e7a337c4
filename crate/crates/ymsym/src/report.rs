//! Machine-readable verification report: one record per check with residual
//! statistics, an overall verdict, and the configuration echo. Field order
//! is fixed by the struct layout, so reruns are byte-identical apart from
//! the wall time.

use crate::config::RunConfig;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CheckRecord {
    pub check: String,
    pub anchor: String,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
    pub errors: Vec<String>,
}

impl CheckRecord {
    pub fn new(check: &str, anchor: &str, tolerance: f64) -> Self {
        CheckRecord {
            check: check.into(),
            anchor: anchor.into(),
            max_residual: 0.0,
            mean_residual: 0.0,
            samples: 0,
            tolerance,
            pass: false,
            errors: Vec::new(),
        }
    }

    pub fn with_stats(mut self, max: f64, mean: f64, samples: usize) -> Self {
        self.max_residual = max;
        self.mean_residual = mean;
        self.samples = samples;
        self.pass = self.errors.is_empty() && max < self.tolerance;
        self
    }

    /// Detection record: passes when the residual *exceeds* the threshold.
    pub fn with_detection(mut self, max: f64, samples: usize) -> Self {
        self.max_residual = max;
        self.mean_residual = max;
        self.samples = samples;
        self.pass = self.errors.is_empty() && max > self.tolerance;
        self
    }

    pub fn failed(mut self, err: String) -> Self {
        self.errors.push(err);
        self.pass = false;
        self
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Report {
    pub schema: u32,
    pub version: String,
    pub config: RunConfig,
    pub records: Vec<CheckRecord>,
    pub overall_pass: bool,
    pub wall_ms: u64,
}

impl Report {
    pub fn new(config: RunConfig, records: Vec<CheckRecord>, wall_ms: u64) -> Self {
        let overall_pass =
            !records.is_empty() && records.iter().all(|r| r.pass && r.errors.is_empty());
        Report {
            schema: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            records,
            overall_pass,
            wall_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
