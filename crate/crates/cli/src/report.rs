use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::spec::RunSpec;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: Value,
    pub tolerance: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, measured: impl Serialize, tolerance: impl Serialize) -> Self {
        Check {
            name: name.into(),
            passed,
            measured: to_value(measured),
            tolerance: to_value(tolerance),
            stderr: None,
            details: Value::Null,
        }
    }

    pub fn with_stderr(mut self, stderr: f64) -> Self {
        self.stderr = Some(stderr);
        self
    }

    pub fn with_details(mut self, details: impl Serialize) -> Self {
        self.details = to_value(details);
        self
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report data serializes")
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub spec: RunSpec,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub diagnostics: Value,
    pub artifacts: Vec<String>,
    /// Wall-clock seconds per phase; only present when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new(spec: RunSpec) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            tool: "symwrap",
            version: env!("CARGO_PKG_VERSION"),
            spec,
            passed: true,
            checks: Vec::new(),
            diagnostics: Value::Null,
            artifacts: Vec::new(),
            timings: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Fixed 17-significant-digit float formatting for CSV.
pub fn csv_float(v: f64) -> String {
    format!("{v:.16e}")
}
