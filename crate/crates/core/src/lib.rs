//! Discretized smooth crossed products of `M_n(C)` by the line and the
//! circle, the operators around their bimodules of differential forms, and a
//! randomized battery of residual checks for the identities they satisfy.

pub mod algebra;
pub mod crossed;
pub mod omega;
mod block;
pub mod error;
pub mod schwartz;
pub mod verify;

pub use error::{LabError, Result};
pub use num_complex::Complex64;
