//! Vector primitives shared by the batch and adaptive paths.

use crate::error::{check_dim, PcaError, Result};
use crate::rng::RngState;

/// Inner product of two equal-length vectors.
pub fn dot(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    Ok(dot_unchecked(a, b))
}

#[inline]
pub(crate) fn dot_unchecked(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // Four accumulators let the compiler vectorize without reassociating.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[2]) + (acc[1] + acc[3]) + tail
}

pub fn norm(v: &[f64]) -> f64 {
    dot_unchecked(v, v).sqrt()
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Returns `v / ‖v‖`, or a degenerate-vector error when `‖v‖ <= tol`.
pub fn normalize(v: &[f64], tol: f64) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    normalize_in_place(&mut out, tol)?;
    Ok(out)
}

pub(crate) fn normalize_in_place(v: &mut [f64], tol: f64) -> Result<f64> {
    let n = norm(v);
    if !(n > tol) || !n.is_finite() {
        return Err(PcaError::DegenerateVector { norm: n, tol });
    }
    let inv = 1.0 / n;
    v.iter_mut().for_each(|x| *x *= inv);
    Ok(n)
}

/// Draws the previous time-steps that take part in one update.
///
/// Indices are zero-based. When `k >= n` every index `0..n` is returned and the
/// generator is not advanced. Otherwise `k` distinct indices are drawn
/// uniformly without replacement (partial Fisher-Yates over `0..n`) and
/// returned in ascending order, so summation order matches the deterministic
/// branch.
pub fn sample_indices(n: usize, k: usize, rng: &mut RngState) -> Vec<usize> {
    assert!(
        n >= 1 && k >= 1,
        "sample_indices requires n >= 1 and k >= 1"
    );
    if k >= n {
        return (0..n).collect();
    }
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.below((n - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool.sort_unstable();
    pool
}
