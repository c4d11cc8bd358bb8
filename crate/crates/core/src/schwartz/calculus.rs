use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, Group};
use crate::block::{self, C64, ZERO};
use crate::error::{LabError, Result};
use crate::schwartz::function::{BiSampledFunction, SampledFunction};
use crate::schwartz::grid::Grid;
use crate::schwartz::spectral::{SpectralCalculus, Transform};

pub const DEFAULT_MEAN_ZERO_TOL: f64 = 1e-8;
pub const MAX_SEMINORM_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Spectral derivative.
pub fn differentiate(f: &SampledFunction) -> Result<SampledFunction> {
    f.check_decay("differentiate")?;
    Ok(differentiate_unchecked(f))
}

pub(crate) fn differentiate_unchecked(f: &SampledFunction) -> SampledFunction {
    let mut out = f.clone();
    let mut calc = SpectralCalculus::new(f.grid());
    apply_componentwise(out.data_mut(), f.grid().points(), f.dim() * f.dim(), |buf| {
        calc.differentiate(buf)
    });
    out
}

/// Runs `op` on each matrix-entry series of a block array with `len` nodes.
fn apply_componentwise(data: &mut [C64], len: usize, b: usize, mut op: impl FnMut(&mut [C64])) {
    let mut buf = vec![ZERO; len];
    for c in 0..b {
        for i in 0..len {
            buf[i] = data[i * b + c];
        }
        op(&mut buf);
        for i in 0..len {
            data[i * b + c] = buf[i];
        }
    }
}

/// Partial spectral derivative of a bi-function along `axis`.
pub fn differentiate_bi(f: &BiSampledFunction, axis: Axis) -> Result<BiSampledFunction> {
    f.check_decay("differentiate")?;
    Ok(differentiate_bi_unchecked(f, axis))
}

pub(crate) fn differentiate_bi_unchecked(f: &BiSampledFunction, axis: Axis) -> BiSampledFunction {
    let mut out = f.clone();
    let mut calc = SpectralCalculus::new(f.grid());
    along_axis(out.data_mut(), f.points(), f.dim() * f.dim(), axis, |buf| {
        calc.differentiate(buf)
    });
    out
}

/// Runs `op` on every line of the product grid parallel to `axis`, entry by entry.
pub(crate) fn along_axis(data: &mut [C64], n: usize, b: usize, axis: Axis, mut op: impl FnMut(&mut [C64])) {
    let mut buf = vec![ZERO; n];
    for line in 0..n {
        for c in 0..b {
            for t in 0..n {
                let at = match axis {
                    Axis::X => (t * n + line) * b + c,
                    Axis::Y => (line * n + t) * b + c,
                };
                buf[t] = data[at];
            }
            op(&mut buf);
            for t in 0..n {
                let at = match axis {
                    Axis::X => (t * n + line) * b + c,
                    Axis::Y => (line * n + t) * b + c,
                };
                data[at] = buf[t];
            }
        }
    }
}

/// Rectangle-rule integral `h * sum f(x_i)`.
pub fn integrate(f: &SampledFunction) -> Result<AlgebraElement> {
    f.check_decay("integrate")?;
    Ok(integrate_unchecked(f))
}

pub(crate) fn integrate_unchecked(f: &SampledFunction) -> AlgebraElement {
    let d = f.dim();
    let mut acc = vec![ZERO; d * d];
    for i in 0..f.len() {
        for (a, v) in acc.iter_mut().zip(f.block(i)) {
            *a += v;
        }
    }
    let w = f.grid().spacing();
    AlgebraElement::from_block(d, &acc).scale(C64::new(w, 0.0))
}

/// `h * sum ||f(x_i)||`.
pub fn l1_norm(f: &SampledFunction) -> f64 {
    f.node_norms().iter().sum::<f64>() * f.grid().spacing()
}

/// Antiderivative of a function with vanishing total mass. On the line it
/// vanishes at `-L`; on the circle it has zero mean.
pub fn cumulative_integral(f: &SampledFunction) -> Result<SampledFunction> {
    cumulative_integral_with_tol(f, DEFAULT_MEAN_ZERO_TOL)
}

pub fn cumulative_integral_with_tol(f: &SampledFunction, mean_zero_tol: f64) -> Result<SampledFunction> {
    f.check_decay("cumulative integral")?;
    let mass = integrate_unchecked(f).seminorm();
    let scale = l1_norm(f);
    if mass > mean_zero_tol * scale {
        return Err(LabError::MeanNotZero {
            mass,
            tolerance: mean_zero_tol,
        });
    }
    let mut out = f.clone();
    let mut calc = SpectralCalculus::new(f.grid());
    apply_componentwise(out.data_mut(), f.len(), f.dim() * f.dim(), |buf| {
        calc.antiderivative(buf)
    });
    out.check_decay("cumulative integral result")?;
    Ok(out)
}

/// `sup_i ||x_i^l (D^k f)(x_i)||`; the weight is dropped on the circle.
pub fn seminorm_kl(f: &SampledFunction, k: usize, l: usize) -> Result<f64> {
    if k > MAX_SEMINORM_ORDER || l > MAX_SEMINORM_ORDER {
        return Err(LabError::InvalidInput(format!(
            "seminorm orders are capped at {MAX_SEMINORM_ORDER}, got ({k}, {l})"
        )));
    }
    let mut g = f.clone();
    if k > 0 {
        f.check_decay("seminorm")?;
        for _ in 0..k {
            g = differentiate_unchecked(&g);
        }
    }
    let grid = f.grid();
    let norms = g.node_norms();
    let weighted = norms.iter().enumerate().map(|(i, v)| match grid.group() {
        Group::Line => grid.node(i).abs().powi(l as i32) * v,
        Group::Circle => *v,
    });
    Ok(weighted.fold(0.0, f64::max))
}

/// Node-wise product `f(x) g(x)`.
pub fn pointwise_multiply(f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    f.ensure_compatible(g)?;
    let d = f.dim();
    let mut out = SampledFunction::zeros(f.grid(), d);
    for i in 0..f.len() {
        block::mul(f.block(i), g.block(i), out.block_mut(i), d);
    }
    Ok(out)
}

/// `(f * g)(x) = int f(y) g(x - y) dy`.
pub fn convolve(f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    f.ensure_compatible(g)?;
    let grid = *f.grid();
    let d = f.dim();
    let mut conv = BlockConvolver::new(&grid, d);
    let fs = conv.spectrum(f.data(), false);
    let gs = conv.spectrum(g.data(), true);
    let out = SampledFunction::from_data(&grid, d, conv.combine(&fs, &gs))?;
    out.check_decay("convolution")?;
    Ok(out)
}

/// Direct double-loop convolution with zero extension outside the grid.
pub fn convolve_direct(f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    f.ensure_compatible(g)?;
    let grid = *f.grid();
    let d = f.dim();
    let n = grid.points();
    let w = grid.spacing();
    let mut out = SampledFunction::zeros(&grid, d);
    for i in 0..n {
        let mut acc = vec![ZERO; d * d];
        for k in 0..n {
            if let Some(j) = grid.diff_index(i, k) {
                block::mul_acc(f.block(k), g.block(j), &mut acc, d);
            }
        }
        for (o, a) in out.block_mut(i).iter_mut().zip(&acc) {
            *o = a * w;
        }
    }
    Ok(out)
}

/// FFT engine for matrix-valued convolutions `w * sum_k u(x_k) g(x_i - x_k)`
/// with periodic indexing.
pub(crate) struct BlockConvolver {
    grid: Grid,
    d: usize,
    transform: Transform,
    buf: Vec<C64>,
}

/// Entry-wise spectra, entry `c` occupying `[c*N, (c+1)*N)`.
pub(crate) struct BlockSpectrum(Vec<C64>);

impl BlockConvolver {
    pub fn new(grid: &Grid, d: usize) -> Self {
        Self {
            grid: *grid,
            d,
            transform: Transform::new(grid.points()),
            buf: vec![ZERO; grid.points()],
        }
    }

    /// Spectrum of `N` contiguous blocks. With `shifted`, node `n` is read
    /// from node `n + origin`, which aligns `g(x_i - x_k)` with cyclic index `i - k`.
    pub fn spectrum(&mut self, data: &[C64], shifted: bool) -> BlockSpectrum {
        let n = self.grid.points();
        let b = self.d * self.d;
        let shift = if shifted { self.grid.origin() } else { 0 };
        let mut spec = vec![ZERO; b * n];
        for c in 0..b {
            for t in 0..n {
                self.buf[t] = data[((t + shift) % n) * b + c];
            }
            self.transform.forward(&mut self.buf);
            spec[c * n..(c + 1) * n].copy_from_slice(&self.buf);
        }
        BlockSpectrum(spec)
    }

    /// Inverse transform of the block product `u_hat * g_hat`, weighted by `h`.
    pub fn combine(&mut self, u: &BlockSpectrum, g: &BlockSpectrum) -> Vec<C64> {
        let n = self.grid.points();
        let d = self.d;
        let b = d * d;
        let w = self.grid.spacing();
        let mut out = vec![ZERO; b * n];
        for r in 0..d {
            for c in 0..d {
                for m in 0..n {
                    let mut acc = ZERO;
                    for s in 0..d {
                        acc += u.0[(r * d + s) * n + m] * g.0[(s * d + c) * n + m];
                    }
                    self.buf[m] = acc;
                }
                self.transform.inverse(&mut self.buf);
                for i in 0..n {
                    out[i * b + r * d + c] = self.buf[i] * w;
                }
            }
        }
        out
    }
}

/// Trigonometric interpolation of the periodic extension at arbitrary points.
pub fn spectral_interpolate(f: &SampledFunction, xs: &[f64]) -> Vec<AlgebraElement> {
    let grid = f.grid();
    let n = grid.points();
    let d = f.dim();
    let b = d * d;
    let mut transform = Transform::new(n);
    let mut coeffs = vec![vec![ZERO; n]; b];
    for (c, series) in coeffs.iter_mut().enumerate() {
        for i in 0..n {
            series[i] = f.data()[i * b + c];
        }
        transform.forward(series);
    }
    let x0 = grid.node(0);
    xs.iter()
        .map(|&x| {
            let mut out = vec![ZERO; b];
            for m in 0..n {
                let k = grid.wavenumber(m);
                if k == 0.0 && m != 0 {
                    continue;
                }
                let phase = C64::from_polar(1.0 / n as f64, k * (x - x0));
                for c in 0..b {
                    out[c] += coeffs[c][m] * phase;
                }
            }
            AlgebraElement::from_block(d, &out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn line() -> Grid {
        Grid::line(10.0, 512).unwrap()
    }

    fn gauss(grid: &Grid, a: &AlgebraElement, c: f64) -> SampledFunction {
        SampledFunction::from_scalar(grid, a, |x| C64::new((-c * x * x).exp(), 0.0))
    }

    fn a2() -> AlgebraElement {
        AlgebraElement::from_rows(&[
            vec![C64::new(1.0, 0.5), C64::new(-0.3, 0.0)],
            vec![C64::new(0.0, 2.0), C64::new(0.7, -0.1)],
        ])
        .unwrap()
    }

    #[test]
    fn derivative_of_gaussian() {
        let g = line();
        let a = a2();
        let f = gauss(&g, &a, 1.0);
        let want = SampledFunction::from_scalar(&g, &a, |x| C64::new(-2.0 * x * (-x * x).exp(), 0.0));
        assert!(differentiate(&f).unwrap().distance(&want).unwrap() < 1e-9);
    }

    #[test]
    fn derivative_on_circle() {
        let g = Grid::circle(64).unwrap();
        let id = AlgebraElement::identity(1);
        let f = SampledFunction::from_scalar(&g, &id, |x| C64::new((TAU * x).sin(), 0.0));
        let want = SampledFunction::from_scalar(&g, &id, |x| C64::new(TAU * (TAU * x).cos(), 0.0));
        assert!(differentiate(&f).unwrap().distance(&want).unwrap() < 1e-12);
        let constant = SampledFunction::from_scalar(&g, &a2(), |_| C64::new(3.0, 0.0));
        assert!(differentiate(&constant).unwrap().sup_norm() < 1e-14);
    }

    #[test]
    fn integrals() {
        let g = line();
        let a = a2();
        let f = SampledFunction::from_scalar(&g, &a, |x| C64::new((-PI * x * x).exp(), 0.0));
        assert!((&integrate(&f).unwrap() - &a).seminorm() < 1e-10);
        let f = gauss(&g, &a, 1.0);
        assert!((&integrate(&f).unwrap() - &a.scale(C64::new(PI.sqrt(), 0.0))).seminorm() < 1e-10);
        let odd = SampledFunction::from_scalar(&g, &a, |x| C64::new(x * (-x * x).exp(), 0.0));
        assert!(integrate(&odd).unwrap().seminorm() < 1e-12);
    }

    #[test]
    fn antiderivative_examples() {
        let g = line();
        let a = a2();
        let f = SampledFunction::from_scalar(&g, &a, |x| C64::new(-2.0 * x * (-x * x).exp(), 0.0));
        let got = cumulative_integral(&f).unwrap();
        assert!(got.distance(&gauss(&g, &a, 1.0)).unwrap() < 1e-8);
        let zero = SampledFunction::zeros(&g, 2);
        assert_eq!(cumulative_integral(&zero).unwrap().sup_norm(), 0.0);
        let bad = gauss(&g, &a, 1.0);
        assert!(matches!(cumulative_integral(&bad), Err(LabError::MeanNotZero { .. })));
    }

    #[test]
    fn seminorm_examples() {
        let g = line();
        let id = AlgebraElement::identity(2);
        let f = SampledFunction::from_scalar(&g, &id, |x| C64::new((-PI * x * x).exp(), 0.0));
        assert!((seminorm_kl(&f, 0, 0).unwrap() - 1.0).abs() < 1e-12);
        let f = gauss(&g, &id, 1.0);
        // the sup of |x| e^{-x^2} sits at x = 1/sqrt(2), between nodes; compare with a fine-grid bound
        let exact = (2.0 * std::f64::consts::E).powf(-0.5);
        let got = seminorm_kl(&f, 0, 1).unwrap();
        assert!(got <= exact + 1e-15 && exact - got < 1e-3);
        assert_eq!(seminorm_kl(&SampledFunction::zeros(&g, 2), 3, 2).unwrap(), 0.0);
        assert!(seminorm_kl(&f, 9, 0).is_err());
    }

    #[test]
    fn gaussian_convolution() {
        let g = line();
        let id = AlgebraElement::identity(1);
        let f = gauss(&g, &id, 1.0);
        let want = SampledFunction::from_scalar(&g, &id, |x| C64::new((PI / 2.0).sqrt() * (-x * x / 2.0).exp(), 0.0));
        let got = convolve(&f, &f).unwrap();
        assert!(got.distance(&want).unwrap() < 1e-8);
        let direct = convolve_direct(&f, &f).unwrap();
        assert!(got.distance(&direct).unwrap() < 1e-12);
    }

    #[test]
    fn decay_violation_is_reported() {
        let g = Grid::line(4.0, 64).unwrap();
        let f = gauss(&g, &a2(), 0.1);
        assert!(matches!(differentiate(&f), Err(LabError::DomainTruncation { .. })));
    }

    #[test]
    fn interpolation_at_nodes_and_between() {
        let g = line();
        let f = gauss(&g, &a2(), 1.0);
        let xs = [g.node(200), 0.123, -1.777];
        let vals = spectral_interpolate(&f, &xs);
        assert!((&vals[0] - &f.value(200)).seminorm() < 1e-13);
        for (x, v) in xs.iter().zip(&vals).skip(1) {
            let want = a2().scale(C64::new((-x * x).exp(), 0.0));
            assert!((v - &want).seminorm() < 1e-12);
        }
    }
}
