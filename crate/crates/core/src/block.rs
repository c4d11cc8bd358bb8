//! Row-major dense blocks stored in flat slices. Every sampled function keeps
//! one `dim * dim` block per node, and these helpers operate on such blocks
//! without allocating.

use num_complex::Complex64;

pub(crate) type C64 = Complex64;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub(crate) fn identity(d: usize) -> Vec<C64> {
    let mut out = vec![ZERO; d * d];
    for i in 0..d {
        out[i * d + i] = ONE;
    }
    out
}

/// `out = a * b`
#[inline]
pub(crate) fn mul(a: &[C64], b: &[C64], out: &mut [C64], d: usize) {
    if d == 1 {
        out[0] = a[0] * b[0];
        return;
    }
    if d == 2 {
        out[0] = a[0] * b[0] + a[1] * b[2];
        out[1] = a[0] * b[1] + a[1] * b[3];
        out[2] = a[2] * b[0] + a[3] * b[2];
        out[3] = a[2] * b[1] + a[3] * b[3];
        return;
    }
    for r in 0..d {
        for c in 0..d {
            let mut acc = ZERO;
            for k in 0..d {
                acc += a[r * d + k] * b[k * d + c];
            }
            out[r * d + c] = acc;
        }
    }
}

/// `out += a * b`
#[inline]
pub(crate) fn mul_acc(a: &[C64], b: &[C64], out: &mut [C64], d: usize) {
    for r in 0..d {
        for c in 0..d {
            let mut acc = ZERO;
            for k in 0..d {
                acc += a[r * d + k] * b[k * d + c];
            }
            out[r * d + c] += acc;
        }
    }
}

/// `out = u * a * v`, using `tmp` as scratch.
#[inline]
pub(crate) fn sandwich(u: &[C64], a: &[C64], v: &[C64], out: &mut [C64], tmp: &mut [C64], d: usize) {
    mul(u, a, tmp, d);
    mul(tmp, v, out, d);
}

/// Operator norm (largest singular value) of a block.
pub(crate) fn op_norm(a: &[C64], d: usize) -> f64 {
    match d {
        1 => a[0].norm(),
        2 => {
            // largest eigenvalue of the Hermitian matrix a* a
            let p = a[0].norm_sqr() + a[2].norm_sqr();
            let r = a[1].norm_sqr() + a[3].norm_sqr();
            let q = a[0].conj() * a[1] + a[2].conj() * a[3];
            let half = 0.5 * (p - r);
            let lam = 0.5 * (p + r) + (half * half + q.norm_sqr()).sqrt();
            lam.max(0.0).sqrt()
        }
        _ => {
            if a.iter().all(|z| *z == ZERO) {
                return 0.0;
            }
            let m = nalgebra::DMatrix::from_row_slice(d, d, a);
            m.singular_values().max()
        }
    }
}

pub(crate) fn is_finite(a: &[C64]) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_norm_matches_svd() {
        let a = [C64::new(0.3, -1.0), C64::new(2.0, 0.5), C64::new(-0.7, 0.1), C64::new(0.0, 1.5)];
        let m = nalgebra::DMatrix::from_row_slice(2, 2, &a);
        let svd = m.singular_values().max();
        assert!((op_norm(&a, 2) - svd).abs() < 1e-13);
    }

    #[test]
    fn general_mul_matches_unrolled() {
        let a = [C64::new(1.0, 2.0), C64::new(3.0, -1.0), C64::new(0.5, 0.0), C64::new(-2.0, 1.0)];
        let b = [C64::new(0.0, 1.0), C64::new(1.0, 1.0), C64::new(2.0, 0.0), C64::new(1.0, -3.0)];
        let mut fast = [ZERO; 4];
        let mut slow = [ZERO; 4];
        mul(&a, &b, &mut fast, 2);
        mul_acc(&a, &b, &mut slow, 2);
        assert_eq!(fast, slow);
    }
}
