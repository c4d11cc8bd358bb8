use crate::block::{self, C64};
use crate::error::{LabError, Result};
use crate::schwartz::calculus::{differentiate_bi_unchecked, Axis};
use crate::schwartz::function::BiSampledFunction;

pub const DEFAULT_DIAG_TOL: f64 = 1e-8;

/// Node-wise multiplication by `x - y`.
pub fn multiply_by_difference(f: &BiSampledFunction) -> BiSampledFunction {
    f.weighted(|x, y| C64::new(x - y, 0.0))
}

/// Solves `(x - y) g = f` for `f` vanishing on the diagonal.
pub fn hadamard_divide(f: &BiSampledFunction) -> Result<BiSampledFunction> {
    hadamard_divide_with_tol(f, DEFAULT_DIAG_TOL)
}

pub fn hadamard_divide_with_tol(f: &BiSampledFunction, diag_tol: f64) -> Result<BiSampledFunction> {
    let grid = *f.grid();
    grid.ensure_line("division by x - y")?;
    f.check_decay("division by x - y")?;
    let n = grid.points();
    let d = f.dim();
    let scale = f.sup_norm();
    let diag = (0..n).map(|i| block::op_norm(f.block(i, i), d)).fold(0.0, f64::max);
    if diag > diag_tol * scale {
        return Err(LabError::NotInIdeal {
            ratio: diag / scale,
            tolerance: diag_tol,
        });
    }
    let dx = differentiate_bi_unchecked(f, Axis::X);
    let dy = differentiate_bi_unchecked(f, Axis::Y);
    let mut out = BiSampledFunction::zeros(&grid, d);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                let (a, b) = (dx.block(i, i), dy.block(i, i));
                for ((o, p), q) in out.block_mut(i, i).iter_mut().zip(a).zip(b) {
                    *o = (p - q) * 0.5;
                }
            } else {
                let s = 1.0 / (grid.node(i) - grid.node(j));
                for (o, v) in out.block_mut(i, j).iter_mut().zip(f.block(i, j)) {
                    *o = v * s;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraElement;
    use crate::schwartz::grid::Grid;

    #[test]
    fn explicit_factor() {
        let g = Grid::line(10.0, 256).unwrap();
        let id = AlgebraElement::identity(2);
        let base = BiSampledFunction::from_scalar(&g, &id, |x, y| C64::new((-x * x - y * y).exp(), 0.0));
        let f = multiply_by_difference(&base);
        let got = hadamard_divide(&f).unwrap();
        assert!(got.distance(&base).unwrap() < 1e-8);
        assert!(multiply_by_difference(&got).distance(&f).unwrap() < 1e-7);
    }

    #[test]
    fn zero_and_non_ideal() {
        let g = Grid::line(10.0, 128).unwrap();
        assert_eq!(hadamard_divide(&BiSampledFunction::zeros(&g, 1)).unwrap().sup_norm(), 0.0);
        let id = AlgebraElement::identity(1);
        let f = BiSampledFunction::from_scalar(&g, &id, |x, y| C64::new((-x * x - y * y).exp(), 0.0));
        assert!(matches!(hadamard_divide(&f), Err(LabError::NotInIdeal { .. })));
    }
}
