use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::block::{C64, ZERO};
use crate::error::{LabError, Result};
use crate::schwartz::calculus::{along_axis, Axis};
use crate::schwartz::function::{BiSampledFunction, SampledFunction};
use crate::schwartz::grid::Grid;
use crate::schwartz::spectral::Transform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

/// Quadrature of `int f(x) exp(-+2 pi i x xi) dx` at the grid nodes `xi`,
/// evaluated by a chirp-z transform.
struct Chirp {
    n: usize,
    h: f64,
    pre: Vec<C64>,
    kernel: Vec<C64>,
    transform: Transform,
    buf: Vec<C64>,
}

impl Chirp {
    fn new(grid: &Grid, direction: Direction) -> Self {
        let n = grid.points();
        let h = grid.spacing();
        let m = 2 * n;
        let sign = match direction {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        };
        let half = (n / 2) as i64;
        let pre: Vec<C64> = (0..n as i64)
            .map(|i| {
                let a = (i - half) as f64;
                C64::from_polar(1.0, sign * PI * h * h * a * a)
            })
            .collect();
        let mut kernel = vec![ZERO; m];
        for d in -(n as i64 - 1)..(n as i64) {
            let df = d as f64;
            kernel[d.rem_euclid(m as i64) as usize] = C64::from_polar(1.0, -sign * PI * h * h * df * df);
        }
        let mut transform = Transform::new(m);
        transform.forward(&mut kernel);
        Self {
            n,
            h,
            pre,
            kernel,
            transform,
            buf: vec![ZERO; m],
        }
    }

    fn apply(&mut self, series: &mut [C64]) {
        let n = self.n;
        self.buf.fill(ZERO);
        for i in 0..n {
            self.buf[i] = series[i] * self.pre[i];
        }
        self.transform.forward(&mut self.buf);
        for (z, k) in self.buf.iter_mut().zip(&self.kernel) {
            *z *= k;
        }
        self.transform.inverse(&mut self.buf);
        for i in 0..n {
            series[i] = self.buf[i] * self.pre[i] * self.h;
        }
    }
}

fn check_fit(grid: &Grid) -> Result<()> {
    grid.ensure_line("the Fourier transform")?;
    let l = grid.half_width();
    if (grid.points() as f64) < 4.0 * l * l {
        return Err(LabError::GridMismatch(format!(
            "frequency window [-{l}, {l}] exceeds the band of {} points; need N >= 4 L^2 = {}",
            grid.points(),
            4.0 * l * l
        )));
    }
    Ok(())
}

fn overflow(context: &str, ratio: f64, tol: f64) -> LabError {
    LabError::GridMismatch(format!(
        "{context}: transform does not decay inside the frequency window (edge ratio {ratio:.3e} > {tol:.1e})"
    ))
}

/// Continuous Fourier transform with kernel `exp(-2 pi i x xi)`, sampled on
/// the same grid.
pub fn fourier_transform(f: &SampledFunction, direction: Direction) -> Result<SampledFunction> {
    let grid = *f.grid();
    check_fit(&grid)?;
    f.check_decay("Fourier transform input")?;
    let mut out = f.clone();
    let mut chirp = Chirp::new(&grid, direction);
    let n = grid.points();
    let b = f.dim() * f.dim();
    let mut buf = vec![ZERO; n];
    let data = out.data_mut();
    for c in 0..b {
        for i in 0..n {
            buf[i] = data[i * b + c];
        }
        chirp.apply(&mut buf);
        for i in 0..n {
            data[i * b + c] = buf[i];
        }
    }
    let ratio = out.edge_ratio();
    if ratio > grid.decay_tol() {
        return Err(overflow("Fourier transform", ratio, grid.decay_tol()));
    }
    Ok(out)
}

/// Two-dimensional transform with kernel `exp(-2 pi i (x xi + y eta))`.
pub fn fourier_transform_2d(f: &BiSampledFunction, direction: Direction) -> Result<BiSampledFunction> {
    let grid = *f.grid();
    check_fit(&grid)?;
    f.check_decay("Fourier transform input")?;
    let mut out = f.clone();
    let mut chirp = Chirp::new(&grid, direction);
    let n = grid.points();
    let b = f.dim() * f.dim();
    along_axis(out.data_mut(), n, b, Axis::X, |buf| chirp.apply(buf));
    along_axis(out.data_mut(), n, b, Axis::Y, |buf| chirp.apply(buf));
    let ratio = out.edge_ratio();
    if ratio > grid.decay_tol() {
        return Err(overflow("2-D Fourier transform", ratio, grid.decay_tol()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraElement;

    #[test]
    fn gaussian_is_fixed() {
        let g = Grid::line(10.0, 512).unwrap();
        let a = AlgebraElement::from_rows(&[
            vec![C64::new(1.0, 1.0), C64::new(0.0, -2.0)],
            vec![C64::new(0.5, 0.0), C64::new(-1.0, 0.0)],
        ])
        .unwrap();
        let f = SampledFunction::from_scalar(&g, &a, |x| C64::new((-PI * x * x).exp(), 0.0));
        let got = fourier_transform(&f, Direction::Forward).unwrap();
        assert!(got.distance(&f).unwrap() < 1e-9);
    }

    #[test]
    fn shifted_gaussian_picks_up_phase() {
        let g = Grid::line(8.0, 256).unwrap();
        let id = AlgebraElement::identity(1);
        let mu = 1.25;
        let f = SampledFunction::from_scalar(&g, &id, |x| C64::new((-PI * (x - mu) * (x - mu)).exp(), 0.0));
        let want = SampledFunction::from_scalar(&g, &id, |xi| {
            C64::from_polar((-PI * xi * xi).exp(), -2.0 * PI * mu * xi)
        });
        let got = fourier_transform(&f, Direction::Forward).unwrap();
        assert!(got.distance(&want).unwrap() < 1e-10);
    }

    #[test]
    fn window_must_fit() {
        let g = Grid::line(10.0, 256).unwrap();
        let f = SampledFunction::zeros(&g, 1);
        assert!(matches!(fourier_transform(&f, Direction::Forward), Err(LabError::GridMismatch(_))));
        let c = Grid::circle(64).unwrap();
        assert!(fourier_transform(&SampledFunction::zeros(&c, 1), Direction::Forward).is_err());
    }
}
