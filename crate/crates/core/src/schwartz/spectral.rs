//! FFT plumbing shared by derivatives, antiderivatives and convolutions.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::algebra::Group;
use crate::block::{C64, ZERO};
use crate::schwartz::grid::Grid;

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

/// Cached plan for length `n`; plans are per thread.
pub(crate) fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry((n, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// Forward/inverse transform pair with its own scratch space.
pub(crate) struct Transform {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
}

impl Transform {
    pub fn new(n: usize) -> Self {
        let forward = plan(n, false);
        let inverse = plan(n, true);
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n,
            forward,
            inverse,
            scratch: vec![ZERO; len],
        }
    }

    pub fn forward(&mut self, buf: &mut [C64]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }

    /// Inverse transform including the `1/n` normalization.
    pub fn inverse(&mut self, buf: &mut [C64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
        let s = 1.0 / self.n as f64;
        for z in buf.iter_mut() {
            *z *= s;
        }
    }
}

/// Per-grid spectral calculus on single series of length `N`.
pub(crate) struct SpectralCalculus {
    grid: Grid,
    transform: Transform,
    ik: Vec<C64>,
}

impl SpectralCalculus {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.points();
        let ik = (0..n).map(|m| C64::new(0.0, grid.wavenumber(m))).collect();
        Self {
            grid: *grid,
            transform: Transform::new(n),
            ik,
        }
    }

    /// In-place spectral derivative.
    pub fn differentiate(&mut self, buf: &mut [C64]) {
        self.transform.forward(buf);
        for (z, k) in buf.iter_mut().zip(&self.ik) {
            *z *= k;
        }
        self.transform.inverse(buf);
    }

    /// In-place antiderivative. On the line the result vanishes at the first
    /// node and keeps the linear part coming from a nonzero mean; on the
    /// circle the result has zero mean.
    pub fn antiderivative(&mut self, buf: &mut [C64]) {
        let n = buf.len();
        self.transform.forward(buf);
        let mean = buf[0] / n as f64;
        buf[0] = ZERO;
        for (z, k) in buf.iter_mut().zip(&self.ik).skip(1) {
            if k.im == 0.0 {
                *z = ZERO;
            } else {
                *z /= k;
            }
        }
        self.transform.inverse(buf);
        if self.grid.group() == Group::Line {
            let x0 = self.grid.node(0);
            let pin = buf[0];
            for (i, z) in buf.iter_mut().enumerate() {
                *z += mean * (self.grid.node(i) - x0) - pin;
            }
        }
    }
}
