use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Action, ActionKind, AlgebraElement, Group};
use crate::block::{C64, ZERO};
use crate::crossed::Quadrature;
use crate::error::{LabError, Result};
use crate::schwartz::{Grid, DEFAULT_DECAY_TOL, DEFAULT_DIAG_TOL, DEFAULT_MEAN_ZERO_TOL};
use crate::verify::inputs::TestInputSpec;

/// Tolerance key that overrides every check.
pub const ALL_CHECKS: &str = "all";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub points: usize,
    /// Group used by the suites that run on either group.
    pub group: Group,
    /// Points of the circle grid used by circle-only suites.
    pub circle_points: usize,
    pub decay_tol: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            half_width: 10.0,
            points: 512,
            group: Group::Line,
            circle_points: 128,
            decay_tol: DEFAULT_DECAY_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActionConfig {
    pub kind: ActionKind,
    /// Row-major generator entries as `[re, im]` pairs. Drawn at random per
    /// trial when absent.
    pub generator: Option<Vec<Vec<[f64; 2]>>>,
    /// Operator norm of randomly drawn generators.
    pub generator_norm: f64,
    /// Defaults to the grid group.
    pub group: Option<Group>,
}

impl Default for ActionConfig {
    fn default() -> Self {
        Self {
            kind: ActionKind::UnitaryConjugation,
            generator: None,
            generator_norm: 1.0,
            group: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgebraConfig {
    pub dim: usize,
    pub action: ActionConfig,
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            action: ActionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequenceConfig {
    pub mean_zero_tol: f64,
    pub diag_tol: f64,
    pub bump_sharpness: f64,
}

impl Default for SequenceConfig {
    fn default() -> Self {
        Self {
            mean_zero_tol: DEFAULT_MEAN_ZERO_TOL,
            diag_tol: DEFAULT_DIAG_TOL,
            bump_sharpness: crate::omega::DEFAULT_BUMP_SHARPNESS,
        }
    }
}

/// Settings of grid-refinement studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    /// Ascending powers of two.
    pub points: Vec<usize>,
    /// Decay tolerance on coarse grids, where spectral aliasing of the bump
    /// reaches the window edges long before any truncation does.
    pub decay_tol: f64,
    /// Mean-zero tolerance of the homotopy integrands on coarse grids.
    pub mean_zero_tol: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            points: vec![128, 256, 512],
            decay_tol: 1e-4,
            mean_zero_tol: 1e-4,
        }
    }
}

/// Everything a suite needs to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    /// Evaluate defining integrals by direct loops instead of FFT shift-quadrature.
    pub oracle: bool,
    pub grid: GridConfig,
    pub algebra: AlgebraConfig,
    pub sequence: SequenceConfig,
    /// Per-check tolerance overrides; the key `all` applies to every check.
    pub tolerances: BTreeMap<String, f64>,
    pub inputs: TestInputSpec,
    pub circle_inputs: TestInputSpec,
    pub convergence: ConvergenceConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 20,
            oracle: false,
            grid: GridConfig::default(),
            algebra: AlgebraConfig::default(),
            sequence: SequenceConfig::default(),
            tolerances: BTreeMap::new(),
            inputs: TestInputSpec::line_standard(),
            circle_inputs: TestInputSpec::circle_standard(),
            convergence: ConvergenceConfig::default(),
        }
    }
}

impl SuiteConfig {
    pub fn quadrature(&self) -> Quadrature {
        if self.oracle {
            Quadrature::Direct
        } else {
            Quadrature::Fast
        }
    }

    pub fn line_grid(&self) -> Result<Grid> {
        Grid::line_with_decay(self.grid.half_width, self.grid.points, self.grid.decay_tol)
    }

    pub fn circle_grid(&self) -> Result<Grid> {
        Grid::circle(self.grid.circle_points)
    }

    /// Grid of the configured group, used by suites that run on either group.
    pub fn session_grid(&self) -> Result<Grid> {
        match self.grid.group {
            Group::Line => self.line_grid(),
            Group::Circle => Grid::circle(self.grid.points),
        }
    }

    pub fn inputs_for(&self, grid: &Grid) -> TestInputSpec {
        match grid.group() {
            Group::Line => self.inputs,
            Group::Circle => self.circle_inputs,
        }
    }

    pub fn tolerance(&self, id: &str, default: f64) -> f64 {
        self.tolerances
            .get(id)
            .or_else(|| self.tolerances.get(ALL_CHECKS))
            .copied()
            .unwrap_or(default)
    }

    /// The configured generator, if fixed.
    pub fn generator(&self) -> Result<Option<AlgebraElement>> {
        let Some(rows) = &self.algebra.action.generator else {
            return Ok(None);
        };
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .collect();
        let g = AlgebraElement::from_rows(&rows)?;
        if g.dim() != self.algebra.dim {
            return Err(LabError::DimensionMismatch {
                expected: self.algebra.dim,
                found: g.dim(),
            });
        }
        Ok(Some(g))
    }

    /// Action for one trial on `group`: the configured generator, or a random
    /// admissible one.
    pub fn action_for<R: Rng + ?Sized>(&self, group: Group, rng: &mut R) -> Result<Action> {
        let dim = self.algebra.dim;
        let norm = self.algebra.action.generator_norm;
        let fixed = self.generator()?;
        match self.algebra.action.kind {
            ActionKind::Trivial => Ok(Action::trivial(dim, group)),
            ActionKind::UnitaryConjugation => {
                let h = match fixed {
                    Some(h) => h,
                    None => match group {
                        Group::Line => {
                            let scale = rng.random_range(0.25..=1.0) * norm;
                            AlgebraElement::random_hermitian(dim, scale, rng)
                        }
                        Group::Circle => random_periodic_generator(dim, rng),
                    },
                };
                Action::unitary(h, group)
            }
            ActionKind::NilpotentConjugation => {
                let n = match fixed {
                    Some(n) => n,
                    None => random_nilpotent(dim, rng.random_range(0.25..=1.0) * norm, rng),
                };
                Action::nilpotent(n, group)
            }
        }
    }

    /// Checks every setting before any computation starts.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(LabError::InvalidInput("trial count must be positive".into()));
        }
        if self.algebra.dim == 0 || self.algebra.dim > 8 {
            return Err(LabError::InvalidInput(format!(
                "algebra dimension must lie in 1..=8, got {}",
                self.algebra.dim
            )));
        }
        let line = self.line_grid()?;
        let circle = self.circle_grid()?;
        let session = self.session_grid()?;
        self.inputs.validate(&line)?;
        self.circle_inputs.validate(&circle)?;
        for (name, v) in [
            ("convergence decay_tol", self.convergence.decay_tol),
            ("convergence mean_zero_tol", self.convergence.mean_zero_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(LabError::InvalidInput(format!("{name} must lie in (0, 1)")));
            }
        }
        if let Some(g) = self.algebra.action.group {
            if g != self.grid.group {
                return Err(LabError::ActionMismatch(format!(
                    "action group {g} differs from grid group {}",
                    self.grid.group
                )));
            }
        }
        if !(self.algebra.action.generator_norm > 0.0 && self.algebra.action.generator_norm.is_finite()) {
            return Err(LabError::InvalidInput("generator norm must be positive".into()));
        }
        for (k, v) in &self.tolerances {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(LabError::InvalidInput(format!("tolerance `{k}` must be a nonnegative number")));
            }
        }
        for (name, v) in [
            ("mean_zero_tol", self.sequence.mean_zero_tol),
            ("diag_tol", self.sequence.diag_tol),
            ("bump_sharpness", self.sequence.bump_sharpness),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::InvalidInput(format!("{name} must be positive")));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        self.action_for(session.group(), &mut rng)?;
        Ok(())
    }
}

/// Hermitian generator with spectrum in `2 pi {-1, 0, 1}`, conjugated by a random unitary.
pub fn random_periodic_generator<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> AlgebraElement {
    let basis = AlgebraElement::random_hermitian(dim, 1.0, rng);
    let eig = nalgebra::SymmetricEigen::new(basis.to_matrix());
    let v = eig.eigenvectors;
    let diag: Vec<C64> = (0..dim)
        .map(|_| C64::new(std::f64::consts::TAU * rng.random_range(-1i32..=1) as f64, 0.0))
        .collect();
    let d = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    let h = &v * d * v.adjoint();
    // symmetrize away rounding so the Hermitian check is exact
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    AlgebraElement::from_matrix(&h).expect("finite generator")
}

/// Strictly upper triangular matrix with operator norm `norm`.
pub fn random_nilpotent<R: Rng + ?Sized>(dim: usize, norm: f64, rng: &mut R) -> AlgebraElement {
    let mut entries = vec![ZERO; dim * dim];
    for r in 0..dim {
        for c in (r + 1)..dim {
            entries[r * dim + c] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    let n = AlgebraElement::new(dim, entries).expect("finite entries");
    let s = n.seminorm();
    if s == 0.0 {
        return n;
    }
    n.scale(C64::new(norm / s, 0.0))
}
