use serde::Serialize;

use crate::algebra::Group;
use crate::error::{LabError, Result};

pub const DEFAULT_DECAY_TOL: f64 = 1e-10;
pub const MIN_POINTS: usize = 64;
pub const MIN_HALF_WIDTH: f64 = 4.0;

/// Uniform grid on `[-L, L)` (line) or on `R/Z` (circle).
///
/// Line nodes are `x_i = (i - N/2) h` with `h = 2L/N`, circle nodes are
/// `x_i = i/N`. Both lattices are closed under `x + y` and `x - y` up to
/// truncation (line) or wraparound (circle), which the index helpers encode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    group: Group,
    half_width: f64,
    points: usize,
    decay_tol: f64,
}

impl Grid {
    pub fn line(half_width: f64, points: usize) -> Result<Self> {
        Self::line_with_decay(half_width, points, DEFAULT_DECAY_TOL)
    }

    pub fn line_with_decay(half_width: f64, points: usize, decay_tol: f64) -> Result<Self> {
        check_points(points)?;
        if !(half_width.is_finite() && half_width >= MIN_HALF_WIDTH) {
            return Err(LabError::InvalidInput(format!(
                "line half-width must be at least {MIN_HALF_WIDTH}, got {half_width}"
            )));
        }
        if !(decay_tol > 0.0 && decay_tol < 1.0) {
            return Err(LabError::InvalidInput(format!("decay tolerance must lie in (0, 1), got {decay_tol}")));
        }
        Ok(Self {
            group: Group::Line,
            half_width,
            points,
            decay_tol,
        })
    }

    pub fn circle(points: usize) -> Result<Self> {
        check_points(points)?;
        Ok(Self {
            group: Group::Circle,
            half_width: 0.5,
            points,
            decay_tol: DEFAULT_DECAY_TOL,
        })
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// `L` for the line; `1/2` for the circle.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn decay_tol(&self) -> f64 {
        self.decay_tol
    }

    /// Length of the periodic cell: `2L` or `1`.
    pub fn period(&self) -> f64 {
        2.0 * self.half_width
    }

    /// Node spacing, which is also the quadrature weight.
    pub fn spacing(&self) -> f64 {
        self.period() / self.points as f64
    }

    /// Index of the node at zero.
    pub fn origin(&self) -> usize {
        match self.group {
            Group::Line => self.points / 2,
            Group::Circle => 0,
        }
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - self.origin() as f64) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    fn wrap(&self, k: isize) -> Option<usize> {
        let n = self.points as isize;
        match self.group {
            Group::Line => (0..n).contains(&k).then_some(k as usize),
            Group::Circle => Some(k.rem_euclid(n) as usize),
        }
    }

    /// Node index of `x_i + x_j`.
    pub fn sum_index(&self, i: usize, j: usize) -> Option<usize> {
        self.wrap(i as isize + j as isize - self.origin() as isize)
    }

    /// Node index of `x_i - x_j`.
    pub fn diff_index(&self, i: usize, j: usize) -> Option<usize> {
        self.wrap(i as isize - j as isize + self.origin() as isize)
    }

    /// Node index of `-x_i`.
    pub fn neg_index(&self, i: usize) -> Option<usize> {
        self.wrap(2 * self.origin() as isize - i as isize)
    }

    /// Number of anti-diagonals `{(i, j) : x_i + x_j = s}` of the product grid.
    pub fn antidiagonals(&self) -> usize {
        match self.group {
            Group::Line => 2 * self.points - 1,
            Group::Circle => self.points,
        }
    }

    /// Anti-diagonal containing node pair `(i, j)`.
    pub fn antidiagonal_of(&self, i: usize, j: usize) -> usize {
        match self.group {
            Group::Line => i + j,
            Group::Circle => (i + j) % self.points,
        }
    }

    /// Second index `j` with `(k, j)` on anti-diagonal `m`, i.e. the node of `s_m - x_k`.
    pub fn partner(&self, m: usize, k: usize) -> Option<usize> {
        self.wrap(m as isize - k as isize)
    }

    /// The value `s_m = x_i + x_j` of anti-diagonal `m` (not necessarily a node on the line).
    pub fn antidiagonal_value(&self, m: usize) -> f64 {
        match self.group {
            Group::Line => (m as f64 - self.points as f64) * self.spacing(),
            Group::Circle => m as f64 / self.points as f64,
        }
    }

    /// Angular wavenumber of DFT bin `m`; the Nyquist bin maps to zero.
    pub fn wavenumber(&self, m: usize) -> f64 {
        let n = self.points;
        let signed = if m < n / 2 {
            m as f64
        } else if m == n / 2 {
            0.0
        } else {
            m as f64 - n as f64
        };
        std::f64::consts::TAU * signed / self.period()
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(LabError::GridMismatch(format!(
                "{} grid with {} points vs {} grid with {} points",
                self.group, self.points, other.group, other.points
            )));
        }
        Ok(())
    }

    pub(crate) fn ensure_line(&self, op: &str) -> Result<()> {
        if self.group != Group::Line {
            return Err(LabError::GridMismatch(format!("{op} is only defined on the line")));
        }
        Ok(())
    }
}

fn check_points(points: usize) -> Result<()> {
    if points < MIN_POINTS || !points.is_power_of_two() {
        return Err(LabError::InvalidInput(format!(
            "grid points must be a power of two and at least {MIN_POINTS}, got {points}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_lattice_arithmetic() {
        let g = Grid::line(10.0, 64).unwrap();
        assert_eq!(g.node(0), -10.0);
        assert_eq!(g.node(g.origin()), 0.0);
        for i in 0..64 {
            for j in 0..64 {
                if let Some(k) = g.sum_index(i, j) {
                    assert!((g.node(k) - g.node(i) - g.node(j)).abs() < 1e-12);
                }
                if let Some(k) = g.diff_index(i, j) {
                    assert!((g.node(k) - g.node(i) + g.node(j)).abs() < 1e-12);
                }
                let m = g.antidiagonal_of(i, j);
                assert_eq!(g.partner(m, i), Some(j));
                assert!((g.antidiagonal_value(m) - g.node(i) - g.node(j)).abs() < 1e-12);
            }
        }
        assert_eq!(g.neg_index(0), None);
        assert_eq!(g.neg_index(1), Some(63));
    }

    #[test]
    fn circle_wraps() {
        let g = Grid::circle(64).unwrap();
        assert_eq!(g.sum_index(40, 30), Some(6));
        assert_eq!(g.diff_index(3, 5), Some(62));
        assert_eq!(g.partner(2, 5), Some(61));
    }

    #[test]
    fn invariants_enforced() {
        assert!(Grid::line(10.0, 100).is_err());
        assert!(Grid::line(10.0, 32).is_err());
        assert!(Grid::line(3.0, 128).is_err());
        assert!(Grid::circle(48).is_err());
        let a = Grid::line(10.0, 128).unwrap();
        let b = Grid::line(10.0, 256).unwrap();
        assert!(matches!(a.ensure_same(&b), Err(LabError::GridMismatch(_))));
    }
}
