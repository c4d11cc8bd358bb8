use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crosslab::verify::{AlgebraConfig, ConvergenceConfig, GridConfig, SequenceConfig, SuiteConfig, TestInputSpec, SUITE_NAMES};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub report: PathBuf,
    pub convergence_csv: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            report: PathBuf::from("crosslab-report.json"),
            convergence_csv: PathBuf::from("convergence.csv"),
        }
    }
}

/// The whole run configuration, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabConfig {
    pub seed: u64,
    pub trials: usize,
    pub oracle: bool,
    /// Suites to run; empty selects all of them.
    pub suites: Vec<String>,
    pub grid: GridConfig,
    pub algebra: AlgebraConfig,
    pub sequence: SequenceConfig,
    pub tolerances: BTreeMap<String, f64>,
    pub inputs: TestInputSpec,
    pub circle_inputs: TestInputSpec,
    pub output: OutputConfig,
    pub convergence: ConvergenceConfig,
}

impl Default for LabConfig {
    fn default() -> Self {
        let s = SuiteConfig::default();
        Self {
            seed: s.seed,
            trials: s.trials,
            oracle: s.oracle,
            suites: Vec::new(),
            grid: s.grid,
            algebra: s.algebra,
            sequence: s.sequence,
            tolerances: s.tolerances,
            inputs: s.inputs,
            circle_inputs: s.circle_inputs,
            output: OutputConfig::default(),
            convergence: s.convergence,
        }
    }
}

impl LabConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            seed: self.seed,
            trials: self.trials,
            oracle: self.oracle,
            grid: self.grid.clone(),
            algebra: self.algebra.clone(),
            sequence: self.sequence.clone(),
            tolerances: self.tolerances.clone(),
            inputs: self.inputs,
            circle_inputs: self.circle_inputs,
            convergence: self.convergence.clone(),
        }
    }

    pub fn selected_suites(&self) -> Vec<String> {
        if self.suites.is_empty() {
            SUITE_NAMES.iter().map(|s| s.to_string()).collect()
        } else {
            self.suites.clone()
        }
    }

    /// Checks suite names and every numerical setting.
    pub fn validate(&self) -> Result<(), String> {
        for s in &self.suites {
            if !SUITE_NAMES.contains(&s.as_str()) {
                return Err(format!("unknown suite `{s}`"));
            }
        }
        self.suite_config().validate().map_err(|e| e.to_string())
    }
}
