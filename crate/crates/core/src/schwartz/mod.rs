//! Sampled matrix-valued functions on a truncated line or on the circle,
//! with spectral calculus, the Fourier transform and division by `x - y`.

mod calculus;
mod fourier;
mod function;
mod grid;
mod hadamard;
pub(crate) mod spectral;

pub use calculus::{
    convolve, convolve_direct, cumulative_integral, cumulative_integral_with_tol, differentiate,
    differentiate_bi, integrate, l1_norm, pointwise_multiply, seminorm_kl, spectral_interpolate, Axis,
    DEFAULT_MEAN_ZERO_TOL, MAX_SEMINORM_ORDER,
};
pub(crate) use calculus::{differentiate_bi_unchecked, differentiate_unchecked, BlockConvolver};
pub use fourier::{fourier_transform, fourier_transform_2d, Direction};
pub use function::{BiSampledFunction, SampledFunction, EDGE_NODES};
pub use grid::{Grid, DEFAULT_DECAY_TOL, MIN_HALF_WIDTH, MIN_POINTS};
pub use hadamard::{hadamard_divide, hadamard_divide_with_tol, multiply_by_difference, DEFAULT_DIAG_TOL};
