use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{AlgebraElement, Group};
use crate::crossed::CrossedElement;
use crate::error::{LabError, Result};
use crate::schwartz::{BiSampledFunction, Grid, SampledFunction};
use crate::verify::config::SuiteConfig;
use crate::verify::inputs::{random_bischwartz, random_schwartz, TestInputSpec};
use crate::verify::report::{CheckRecord, LabReport, RunMetadata, Timing, VerificationReport};

mod algebraic;
mod sequence;
mod scalar;

pub use scalar::{scalar_sequence_check, ScalarVariant};

/// One identity of a suite: id, the statement it checks, default tolerance.
pub(crate) struct Check {
    pub id: &'static str,
    pub reference: &'static str,
    pub tolerance: f64,
}

const fn check(id: &'static str, reference: &'static str, tolerance: f64) -> Check {
    Check { id, reference, tolerance }
}

/// Residuals measured in one trial, keyed by check id.
pub(crate) type Outcome = Vec<(&'static str, Result<f64>)>;

pub(crate) struct Trial<'a> {
    pub config: &'a SuiteConfig,
    pub grid: Grid,
    pub rng: ChaCha8Rng,
}

impl Trial<'_> {
    fn next_seed(&mut self) -> u64 {
        rand::Rng::random(&mut self.rng)
    }

    fn spec(&mut self) -> TestInputSpec {
        self.config.inputs_for(&self.grid).with_seed(self.next_seed())
    }

    pub fn function(&mut self, dim: usize) -> Result<SampledFunction> {
        let spec = self.spec();
        random_schwartz(&spec, &self.grid, dim)
    }

    pub fn bifunction(&mut self, dim: usize) -> Result<BiSampledFunction> {
        let spec = self.spec();
        random_bischwartz(&spec, &self.grid, dim)
    }

    pub fn crossed(&mut self, action: &crate::algebra::Action) -> Result<CrossedElement> {
        let f = self.function(action.dim())?;
        CrossedElement::new(f, action)
    }

    pub fn element(&mut self, dim: usize) -> AlgebraElement {
        AlgebraElement::random(dim, 1.0, &mut self.rng)
    }

    pub fn action(&mut self, group: Group) -> Result<crate::algebra::Action> {
        let config = self.config;
        config.action_for(group, &mut self.rng)
    }
}

pub(crate) struct Suite {
    pub name: &'static str,
    pub reference: &'static str,
    pub checks: &'static [Check],
    pub grid: fn(&SuiteConfig) -> Result<Grid>,
    pub trial: fn(&mut Trial<'_>) -> Result<Outcome>,
}

const SUITES: &[Suite] = &[
    algebraic::ACTION,
    algebraic::CROSSED_ALGEBRA,
    sequence::BIMODULE,
    sequence::EXACT_SEQUENCE_CIRCLE,
    sequence::EXACT_SEQUENCE_LINE,
    algebraic::FOURIER,
    scalar::HADAMARD,
    algebraic::OPERATOR_T,
    scalar::SCALAR_SEQUENCES,
    sequence::TENSOR,
];

/// Registered suite names, sorted.
pub const SUITE_NAMES: [&str; 10] = [
    "action",
    "bimodule",
    "crossed-algebra",
    "exact-sequence-circle",
    "exact-sequence-line",
    "fourier",
    "hadamard",
    "operator-T",
    "scalar-sequences",
    "tensor",
];

fn find(name: &str) -> Result<&'static Suite> {
    SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| LabError::UnknownSuite(name.to_string()))
}

pub fn suite_reference(name: &str) -> Result<&'static str> {
    Ok(find(name)?.reference)
}

/// `(name, statement)` pairs sorted by name.
pub fn list_suites() -> Vec<(&'static str, &'static str)> {
    let mut out: Vec<_> = SUITES.iter().map(|s| (s.name, s.reference)).collect();
    out.sort();
    out
}

/// FNV-1a, stable across platforms and releases.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub(crate) fn trial_seed(name: &str, seed: u64, trial: usize) -> u64 {
    let mut key = Vec::with_capacity(name.len() + 16);
    key.extend_from_slice(name.as_bytes());
    key.extend_from_slice(&seed.to_le_bytes());
    key.extend_from_slice(&(trial as u64).to_le_bytes());
    fnv1a(&key)
}

#[derive(Default, Clone)]
struct Tally {
    worst: Option<f64>,
    error: Option<String>,
    seen: bool,
}

fn metadata(config: &SuiteConfig, grid: &Grid) -> RunMetadata {
    let grid = match grid.group() {
        Group::Line => format!("line L={} N={}", grid.half_width(), grid.points()),
        Group::Circle => format!("circle N={}", grid.points()),
    };
    RunMetadata {
        grid,
        action_kind: config.algebra.action.kind.to_string(),
        dim: config.algebra.dim,
        trials: config.trials,
        seed: config.seed,
        quadrature: if config.oracle { "direct" } else { "fast" }.to_string(),
    }
}

fn execute(suite: &Suite, config: &SuiteConfig) -> Result<VerificationReport> {
    config.validate()?;
    let start = Instant::now();
    let grid = (suite.grid)(config)?;
    let outcomes: Vec<Result<Outcome>> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let mut trial = Trial {
                config,
                grid,
                rng: ChaCha8Rng::seed_from_u64(trial_seed(suite.name, config.seed, t)),
            };
            (suite.trial)(&mut trial)
        })
        .collect();
    let mut tallies = vec![Tally::default(); suite.checks.len()];
    for outcome in outcomes {
        match outcome {
            Ok(list) => {
                for (id, r) in list {
                    let k = suite
                        .checks
                        .iter()
                        .position(|c| c.id == id)
                        .unwrap_or_else(|| panic!("check `{id}` is not registered in suite `{}`", suite.name));
                    let t = &mut tallies[k];
                    t.seen = true;
                    match r {
                        Ok(v) => {
                            let v = if v.is_nan() { f64::INFINITY } else { v };
                            t.worst = Some(t.worst.map_or(v, |w: f64| w.max(v)));
                        }
                        Err(e) => {
                            t.error.get_or_insert_with(|| e.to_string());
                        }
                    }
                }
            }
            Err(e) => {
                for t in tallies.iter_mut() {
                    t.seen = true;
                    t.error.get_or_insert_with(|| e.to_string());
                }
            }
        }
    }
    let checks: Vec<CheckRecord> = suite
        .checks
        .iter()
        .zip(tallies)
        .filter(|(_, t)| t.seen)
        .map(|(c, t)| {
            let tolerance = config.tolerance(c.id, c.tolerance);
            let passed = t.error.is_none() && t.worst.is_some_and(|w| w <= tolerance);
            CheckRecord {
                id: c.id.to_string(),
                reference: c.reference.to_string(),
                residual: t.worst,
                tolerance,
                passed,
                note: t.error,
            }
        })
        .collect();
    Ok(VerificationReport {
        suite: suite.name.to_string(),
        reference: suite.reference.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        metadata: metadata(config, &grid),
        timing: Timing {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    })
}

/// Runs one suite over `config.trials` seeded random inputs and keeps the
/// worst residual of every check.
pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<VerificationReport> {
    execute(find(name)?, config)
}

/// Runs several suites concurrently. Unknown names fail before any work starts.
pub fn run_suites(names: &[&str], config: &SuiteConfig) -> Result<LabReport> {
    let suites: Vec<&Suite> = names.iter().map(|n| find(n)).collect::<Result<_>>()?;
    config.validate()?;
    let reports: Vec<VerificationReport> = suites.par_iter().map(|s| execute(s, config)).collect::<Result<_>>()?;
    Ok(LabReport::from_reports(reports))
}

/// `|lhs - rhs|_sup / scale`.
pub(crate) fn relative(distance: Result<f64>, scale: f64) -> Result<f64> {
    let d = distance?;
    if d == 0.0 {
        return Ok(0.0);
    }
    Ok(d / scale)
}
