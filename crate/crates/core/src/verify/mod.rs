//! Randomized residual checks of the identities, grouped into named suites.

pub mod config;
pub mod convergence;
pub mod inputs;
pub mod report;
mod suites;

pub use config::{ActionConfig, ConvergenceConfig, AlgebraConfig, GridConfig, SequenceConfig, SuiteConfig, ALL_CHECKS};
pub use convergence::{convergence_study, ConvergenceRow, ConvergenceStudy, QUADRATURE_FLOOR, REQUIRED_RATIO};
pub use inputs::{random_bischwartz, random_schwartz, TestInputSpec};
pub use report::{CheckRecord, LabReport, RunMetadata, Timing, VerificationReport};
pub use suites::{list_suites, run_suite, run_suites, scalar_sequence_check, suite_reference, ScalarVariant, SUITE_NAMES};
