use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::verify::config::SuiteConfig;
use crate::verify::suites::run_suite;

/// Residuals at or below this are quadrature round-off and exempt from the ratio test.
pub const QUADRATURE_FLOOR: f64 = 1e-11;

/// Required reduction of the worst residual per grid doubling.
pub const REQUIRED_RATIO: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub points: usize,
    /// Worst residual over all checks of the suite; absent if a check errored.
    pub worst: Option<f64>,
    /// `worst(N) / worst(N / 2)`.
    pub ratio: Option<f64>,
    pub at_floor: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub suite: String,
    pub rows: Vec<ConvergenceRow>,
    /// Every doubling reduced the worst residual by [`REQUIRED_RATIO`] or reached the floor.
    pub converged: bool,
    pub flags: Vec<String>,
}

impl ConvergenceStudy {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| LabError::InvalidInput(format!("csv output failed: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["points", "worst_residual", "ratio", "at_floor"]).map_err(io)?;
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_default();
        for r in &self.rows {
            w.write_record([r.points.to_string(), fmt(r.worst), fmt(r.ratio), r.at_floor.to_string()])
                .map_err(io)?;
        }
        w.flush().map_err(|e| LabError::InvalidInput(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

/// Reruns `suite` on each grid size and tabulates the worst residual. The
/// coarse-grid guards come from `config.convergence` so that under-resolved
/// grids report a residual instead of aborting.
pub fn convergence_study(suite: &str, points: &[usize], config: &SuiteConfig) -> Result<ConvergenceStudy> {
    if points.is_empty() {
        return Err(LabError::InvalidInput("grid size list is empty".into()));
    }
    if points.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::InvalidInput("grid sizes must be ascending".into()));
    }
    if let Some(n) = points.iter().find(|n| !n.is_power_of_two()) {
        return Err(LabError::InvalidInput(format!("grid size {n} is not a power of two")));
    }
    crate::verify::suites::suite_reference(suite)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(points.len());
    let mut flags = Vec::new();
    for &n in points {
        let mut cfg = config.clone();
        cfg.grid.points = n;
        cfg.grid.circle_points = n;
        cfg.grid.decay_tol = config.convergence.decay_tol;
        cfg.sequence.mean_zero_tol = config.convergence.mean_zero_tol;
        let report = run_suite(suite, &cfg)?;
        let note = report.checks.iter().find_map(|c| c.note.clone());
        let worst = if note.is_some() {
            None
        } else {
            report.checks.iter().filter_map(|c| c.residual).reduce(f64::max)
        };
        let ratio = match (rows.last().and_then(|r| r.worst), worst) {
            (Some(prev), Some(cur)) if prev > 0.0 => Some(cur / prev),
            _ => None,
        };
        rows.push(ConvergenceRow {
            points: n,
            worst,
            ratio,
            at_floor: worst.is_some_and(|w| w <= QUADRATURE_FLOOR),
            note,
        });
    }
    let mut converged = true;
    for (i, r) in rows.iter().enumerate() {
        if r.worst.is_none() {
            converged = false;
            flags.push(format!("N={}: {}", r.points, r.note.as_deref().unwrap_or("no residual")));
            continue;
        }
        if i == 0 || r.at_floor {
            continue;
        }
        match r.ratio {
            Some(q) if q <= REQUIRED_RATIO => {}
            Some(q) => {
                converged = false;
                let kind = if q >= 1.0 { "non-monotone" } else { "slow decrease" };
                flags.push(format!("N={}: {kind}, ratio {q:.3e}", r.points));
            }
            None => converged = false,
        }
    }
    Ok(ConvergenceStudy {
        suite: suite.to_string(),
        rows,
        converged,
        flags,
    })
}
