use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of one identity check, aggregated over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The identity being checked, in words.
    pub reference: String,
    /// Worst relative residual over trials; absent when every trial errored.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub grid: String,
    pub action_kind: String,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub quadrature: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub reference: String,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    pub metadata: RunMetadata,
    pub timing: Timing,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Reports of several suites keyed by suite name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LabReport {
    pub passed: bool,
    pub suites: BTreeMap<String, VerificationReport>,
}

impl LabReport {
    pub fn from_reports(reports: impl IntoIterator<Item = VerificationReport>) -> Self {
        let suites: BTreeMap<_, _> = reports.into_iter().map(|r| (r.suite.clone(), r)).collect();
        let passed = suites.values().all(|r| r.passed);
        Self { passed, suites }
    }

    /// Copy with timings zeroed, for comparing runs.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        for r in out.suites.values_mut() {
            r.timing.elapsed_ms = 0.0;
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
