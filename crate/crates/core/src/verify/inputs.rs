use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, Group};
use crate::block::{C64, ZERO};
use crate::error::{LabError, Result};
use crate::schwartz::{BiSampledFunction, Grid, SampledFunction};

pub const MAX_DEGREE: usize = 6;

/// Parameters of the random smooth inputs fed to the identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestInputSpec {
    pub seed: u64,
    /// Gaussian envelope width, in grid units.
    pub sigma: f64,
    /// Degree cap of the polynomial prefactors.
    pub degree: usize,
    /// Operator norm of each matrix coefficient.
    pub coeff_norm: f64,
    /// Number of envelope terms.
    pub terms: usize,
    /// Centers are drawn from `[-c L, c L]`.
    pub center_fraction: f64,
    /// Use the identity matrix for every coefficient.
    pub unit_coefficients: bool,
    /// Rescale the result to unit sup-norm.
    pub normalize: bool,
}

impl Default for TestInputSpec {
    fn default() -> Self {
        Self::line_standard()
    }
}

impl TestInputSpec {
    pub fn line_standard() -> Self {
        Self {
            seed: 0,
            sigma: 0.4,
            degree: 2,
            coeff_norm: 1.0,
            terms: 3,
            center_fraction: 0.125,
            unit_coefficients: false,
            normalize: true,
        }
    }

    pub fn circle_standard() -> Self {
        Self {
            sigma: 0.06,
            ..Self::line_standard()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let cap = grid.half_width() / 5.0;
        if !(self.sigma > 0.0 && self.sigma <= cap) {
            return Err(LabError::InvalidInput(format!(
                "envelope width must lie in (0, {cap}], got {}",
                self.sigma
            )));
        }
        if self.degree > MAX_DEGREE {
            return Err(LabError::InvalidInput(format!(
                "polynomial degree is capped at {MAX_DEGREE}, got {}",
                self.degree
            )));
        }
        if !(self.coeff_norm > 0.0 && self.coeff_norm.is_finite()) {
            return Err(LabError::InvalidInput("coefficient norm must be positive".into()));
        }
        if self.terms == 0 {
            return Err(LabError::InvalidInput("at least one envelope term is required".into()));
        }
        if !(0.0..=0.5).contains(&self.center_fraction) {
            return Err(LabError::InvalidInput("center fraction must lie in [0, 1/2]".into()));
        }
        Ok(())
    }
}

fn coefficient(spec: &TestInputSpec, dim: usize, rng: &mut ChaCha8Rng) -> AlgebraElement {
    if spec.unit_coefficients {
        AlgebraElement::identity(dim).scale(C64::new(spec.coeff_norm, 0.0))
    } else {
        AlgebraElement::random(dim, spec.coeff_norm, rng)
    }
}

fn center(spec: &TestInputSpec, grid: &Grid, rng: &mut ChaCha8Rng) -> f64 {
    match grid.group() {
        Group::Line => {
            let r = spec.center_fraction * grid.half_width();
            if r == 0.0 {
                0.0
            } else {
                rng.random_range(-r..=r)
            }
        }
        Group::Circle => rng.random_range(0.0..1.0),
    }
}

/// Periodic images that contribute on the circle.
fn images(grid: &Grid) -> std::ops::RangeInclusive<i32> {
    match grid.group() {
        Group::Line => 0..=0,
        Group::Circle => -2..=2,
    }
}

fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

fn normalized(mut data: Vec<C64>, norm: f64) -> Vec<C64> {
    if norm > 0.0 {
        for z in data.iter_mut() {
            *z /= norm;
        }
    }
    data
}

/// `sum_j p_j(x) exp(-(x - mu_j)^2 / 2 sigma^2) a_j`, periodized on the circle.
pub fn random_schwartz(spec: &TestInputSpec, grid: &Grid, dim: usize) -> Result<SampledFunction> {
    spec.validate(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let b = dim * dim;
    let mut data = vec![ZERO; grid.points() * b];
    let nodes = grid.nodes();
    for _ in 0..spec.terms {
        let mu = center(spec, grid, &mut rng);
        let poly: Vec<f64> = (0..=spec.degree).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = coefficient(spec, dim, &mut rng);
        for (i, &x) in nodes.iter().enumerate() {
            let mut s = 0.0;
            for n in images(grid) {
                let u = (x - mu - n as f64) / spec.sigma;
                s += horner(&poly, u) * (-0.5 * u * u).exp();
            }
            for (z, v) in data[i * b..(i + 1) * b].iter_mut().zip(a.as_slice()) {
                *z += v * s;
            }
        }
    }
    let f = SampledFunction::from_data(grid, dim, data)?;
    if spec.normalize {
        let norm = f.sup_norm();
        return SampledFunction::from_data(grid, dim, normalized(f.data().to_vec(), norm));
    }
    Ok(f)
}

/// Bivariate analogue of [`random_schwartz`] with correlated Gaussian envelopes.
pub fn random_bischwartz(spec: &TestInputSpec, grid: &Grid, dim: usize) -> Result<BiSampledFunction> {
    spec.validate(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let b = dim * dim;
    let n = grid.points();
    let nodes = grid.nodes();
    let mut data = vec![ZERO; n * n * b];
    for _ in 0..spec.terms {
        let mx = center(spec, grid, &mut rng);
        let my = center(spec, grid, &mut rng);
        let rho: f64 = rng.random_range(-0.5..0.5);
        // coefficients of u^p v^q with p + q <= degree
        let mut poly = Vec::new();
        for p in 0..=spec.degree {
            for q in 0..=(spec.degree - p) {
                poly.push((p as i32, q as i32, rng.random_range(-1.0..1.0)));
            }
        }
        let a = coefficient(spec, dim, &mut rng);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for ni in images(grid) {
                    for nj in images(grid) {
                        let u = (nodes[i] - mx - ni as f64) / spec.sigma;
                        let v = (nodes[j] - my - nj as f64) / spec.sigma;
                        let q = u * u + v * v + 2.0 * rho * u * v;
                        if q > 1400.0 {
                            continue;
                        }
                        let p: f64 = poly.iter().map(|&(pu, pv, c)| c * u.powi(pu) * v.powi(pv)).sum();
                        s += p * (-0.5 * q).exp();
                    }
                }
                if s != 0.0 {
                    let at = (i * n + j) * b;
                    for (z, v) in data[at..at + b].iter_mut().zip(a.as_slice()) {
                        *z += v * s;
                    }
                }
            }
        }
    }
    let f = BiSampledFunction::from_data(grid, dim, data)?;
    if spec.normalize {
        let norm = f.sup_norm();
        return BiSampledFunction::from_data(grid, dim, normalized(f.data().to_vec(), norm));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_decaying() {
        let g = Grid::line(10.0, 512).unwrap();
        for seed in 0..20 {
            let spec = TestInputSpec::line_standard().with_seed(seed);
            let f = random_schwartz(&spec, &g, 2).unwrap();
            assert_eq!(f, random_schwartz(&spec, &g, 2).unwrap());
            f.check_decay("test").unwrap();
            assert!((f.sup_norm() - 1.0).abs() < 1e-14);
        }
        let h = random_bischwartz(&TestInputSpec::line_standard().with_seed(3), &Grid::line(10.0, 128).unwrap(), 2).unwrap();
        h.check_decay("test").unwrap();
    }

    #[test]
    fn single_unit_term_is_gaussian() {
        let g = Grid::line(10.0, 256).unwrap();
        let spec = TestInputSpec {
            degree: 0,
            terms: 1,
            unit_coefficients: true,
            normalize: false,
            ..TestInputSpec::line_standard().with_seed(11)
        };
        let f = random_schwartz(&spec, &g, 2).unwrap();
        // identity-valued, and log-profile is an exact parabola
        let vals: Vec<f64> = (0..g.points()).map(|i| f.block(i)[0].re.abs()).collect();
        let peak = (0..vals.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
        let c = vals[peak];
        for i in 0..g.points() {
            let blk = f.block(i);
            assert_eq!(blk[1], ZERO);
            assert!((blk[0] - blk[3]).norm() == 0.0);
        }
        let (l0, l1, l2) = (vals[peak - 1].ln(), c.ln(), vals[peak + 1].ln());
        let h = g.spacing();
        let curvature = (l0 - 2.0 * l1 + l2) / (h * h);
        assert!((curvature + 1.0 / (spec.sigma * spec.sigma)).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_specs() {
        let g = Grid::line(10.0, 128).unwrap();
        let wide = TestInputSpec {
            sigma: 3.0,
            ..TestInputSpec::line_standard()
        };
        assert!(random_schwartz(&wide, &g, 1).is_err());
        let deep = TestInputSpec {
            degree: 7,
            ..TestInputSpec::line_standard()
        };
        assert!(random_schwartz(&deep, &g, 1).is_err());
    }

    #[test]
    fn circle_inputs_are_periodic_and_smooth() {
        let g = Grid::circle(128).unwrap();
        let f = random_schwartz(&TestInputSpec::circle_standard().with_seed(5), &g, 2).unwrap();
        let df = crate::schwartz::differentiate(&f).unwrap();
        assert!(df.sup_norm().is_finite());
    }
}
