//! Scalar (`A = C`, trivial action) versions of the sequence: the pointwise
//! form built on multiplication by `x - y` and the convolution form, written
//! independently of the general machinery.

use crate::block::ZERO;
use crate::error::{LabError, Result};
use crate::schwartz::{differentiate, BiSampledFunction, SampledFunction};

fn ensure_scalar(dim: usize) -> Result<()> {
    if dim != 1 {
        return Err(LabError::DimensionMismatch { expected: 1, found: dim });
    }
    Ok(())
}

/// `j(f)(x, y) = (x - y) f(x, y)`.
pub fn pointwise_j(f: &BiSampledFunction) -> Result<BiSampledFunction> {
    ensure_scalar(f.dim())?;
    Ok(crate::schwartz::multiply_by_difference(f))
}

/// Restriction to the diagonal, `pi(f)(x) = f(x, x)`.
pub fn pointwise_pi(f: &BiSampledFunction) -> Result<SampledFunction> {
    ensure_scalar(f.dim())?;
    let n = f.points();
    let data = (0..n).map(|i| f.block(i, i)[0]).collect();
    SampledFunction::from_data(f.grid(), 1, data)
}

/// A section of [`pointwise_pi`]: `f(x) exp(-(x - y)^2)`.
pub fn pointwise_section(f: &SampledFunction) -> Result<BiSampledFunction> {
    ensure_scalar(f.dim())?;
    let grid = *f.grid();
    let n = grid.points();
    let mut out = BiSampledFunction::zeros(&grid, 1);
    for i in 0..n {
        for j in 0..n {
            let u = grid.node(i) - grid.node(j);
            out.block_mut(i, j)[0] = f.block(i)[0] * (-u * u).exp();
        }
    }
    Ok(out)
}

/// `j(f) = (d/dx - d/dy) f`, one spectral derivative per line of the grid.
pub fn convolution_j(f: &BiSampledFunction) -> Result<BiSampledFunction> {
    ensure_scalar(f.dim())?;
    let grid = *f.grid();
    let n = grid.points();
    let mut out = BiSampledFunction::zeros(&grid, 1);
    for line in 0..n {
        let row = SampledFunction::from_data(&grid, 1, (0..n).map(|t| f.block(line, t)[0]).collect())?;
        let col = SampledFunction::from_data(&grid, 1, (0..n).map(|t| f.block(t, line)[0]).collect())?;
        let d_row = differentiate(&row)?;
        let d_col = differentiate(&col)?;
        for t in 0..n {
            out.block_mut(line, t)[0] -= d_row.block(t)[0];
            out.block_mut(t, line)[0] += d_col.block(t)[0];
        }
    }
    Ok(out)
}

/// `pi(f)(x) = int f(y, x - y) dy`.
pub fn convolution_pi(f: &BiSampledFunction) -> Result<SampledFunction> {
    ensure_scalar(f.dim())?;
    let grid = *f.grid();
    let n = grid.points();
    let w = grid.spacing();
    let mut data = vec![ZERO; n];
    for (i, out) in data.iter_mut().enumerate() {
        let mut acc = ZERO;
        for k in 0..n {
            if let Some(j) = grid.diff_index(i, k) {
                acc += f.block(k, j)[0];
            }
        }
        *out = acc * w;
    }
    SampledFunction::from_data(&grid, 1, data)
}

/// `k(f (x) g)(x, y) = f'(x) g(y) - f(x) g'(y)`.
pub fn convolution_k(f: &SampledFunction, g: &SampledFunction) -> Result<BiSampledFunction> {
    ensure_scalar(f.dim())?;
    ensure_scalar(g.dim())?;
    let df = differentiate(f)?;
    let dg = differentiate(g)?;
    let grid = *f.grid();
    let n = grid.points();
    let mut out = BiSampledFunction::zeros(&grid, 1);
    for i in 0..n {
        for j in 0..n {
            out.block_mut(i, j)[0] = df.block(i)[0] * g.block(j)[0] - f.block(i)[0] * dg.block(j)[0];
        }
    }
    Ok(out)
}

