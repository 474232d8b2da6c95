//! Minimum-norm least squares through a one-sided Jacobi SVD.

use alloc::vec;
use alloc::vec::Vec;

use super::matrix::{dot, DenseMatrix};
use crate::error::{Error, Result};

/// Singular values below `RANK_CUTOFF * σ_max` are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-12;

const MAX_SWEEPS: usize = 80;

/// Thin SVD in the form `A·V = B`, where the columns of `B` are mutually
/// orthogonal and `‖B_j‖ = σ_j`.
pub struct JacobiSvd {
    /// Columns of `A·V`, one `Vec` per column.
    pub(crate) b_cols: Vec<Vec<f64>>,
    /// Columns of `V`.
    pub(crate) v_cols: Vec<Vec<f64>>,
}

impl JacobiSvd {
    pub fn new(a: &DenseMatrix) -> Self {
        let (p, q) = a.shape();
        let mut b_cols: Vec<Vec<f64>> = (0..q).map(|j| a.col(j)).collect();
        let mut v_cols: Vec<Vec<f64>> = (0..q)
            .map(|j| {
                let mut e = vec![0.0; q];
                e[j] = 1.0;
                e
            })
            .collect();

        let tol = f64::EPSILON * (p.max(1) as f64);
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for i in 0..q {
                for j in (i + 1)..q {
                    let alpha = dot(&b_cols[i], &b_cols[i]);
                    let beta = dot(&b_cols[j], &b_cols[j]);
                    let gamma = dot(&b_cols[i], &b_cols[j]);
                    if alpha == 0.0 || beta == 0.0 || gamma.abs() <= tol * libm::sqrt(alpha * beta)
                    {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t =
                        libm::copysign(1.0, zeta) / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                    let c = 1.0 / libm::sqrt(1.0 + t * t);
                    let s = c * t;
                    rotate(&mut b_cols, i, j, c, s);
                    rotate(&mut v_cols, i, j, c, s);
                }
            }
            if !rotated {
                break;
            }
        }
        Self { b_cols, v_cols }
    }

    /// Singular values in column order (not sorted).
    pub fn singular_values(&self) -> Vec<f64> {
        self.b_cols.iter().map(|c| libm::sqrt(dot(c, c))).collect()
    }

    /// `pinv(A)·b` with the relative cutoff [`RANK_CUTOFF`].
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let q = self.v_cols.len();
        let sigma = self.singular_values();
        let smax = sigma.iter().cloned().fold(0.0, f64::max);
        let mut x = vec![0.0; q];
        if smax == 0.0 {
            return x;
        }
        let cutoff = RANK_CUTOFF * smax;
        for (k, &s) in sigma.iter().enumerate() {
            if s <= cutoff {
                continue;
            }
            // b_k = σ_k u_k, so u_kᵀb / σ_k = b_kᵀb / σ_k²
            let coef = dot(&self.b_cols[k], b) / (s * s);
            for (xi, vi) in x.iter_mut().zip(&self.v_cols[k]) {
                *xi += coef * vi;
            }
        }
        x
    }
}

fn rotate(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(j);
    for (x, y) in left[i].iter_mut().zip(right[0].iter_mut()) {
        let (xi, yj) = (*x, *y);
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

/// Minimum-norm least-squares solution of `A·x ≈ b`.
///
/// Rank-deficient systems are handled as `pinv(A)·b`.
pub fn lstsq(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let (p, q) = a.shape();
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "lstsq needs a non-empty matrix, got {p}x{q}"
        )));
    }
    if b.len() != p {
        return Err(Error::Shape(alloc::format!(
            "lstsq: matrix has {p} rows, right-hand side has {}",
            b.len()
        )));
    }
    if !a.is_finite() || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("lstsq: non-finite input".into()));
    }
    Ok(JacobiSvd::new(a).solve(b))
}
