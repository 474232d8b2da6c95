//! Lawson–Hanson active-set solver for `min ‖A·x − b‖²  s.t.  x ≥ 0`.
//!
//! The solver runs on the normal-equation data `AᵀA` and `Aᵀb`. The ALS
//! updates solve many right-hand sides against one design matrix, so the Gram
//! matrix is built once per sweep and shared by every row or column.

use alloc::vec;
use alloc::vec::Vec;

use super::lstsq::lstsq;
use super::matrix::{max_abs, DenseMatrix};
use crate::error::{Error, Result};

/// Dual feasibility tolerance, relative to `1 + ‖Aᵀb‖∞`.
pub const DUAL_TOL: f64 = 1e-10;

/// Active-set NNLS over a fixed Gram matrix `G = AᵀA`.
#[derive(Debug, Clone)]
pub struct GramNnls {
    gram: DenseMatrix,
}

impl GramNnls {
    /// Gram solver for the design matrix `a`.
    pub fn new(a: &DenseMatrix) -> Self {
        Self { gram: a.gram() }
    }

    pub fn from_gram(gram: DenseMatrix) -> Self {
        debug_assert_eq!(gram.rows(), gram.cols());
        Self { gram }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// Solves for the right-hand side given as `Aᵀb`.
    pub fn solve(&self, atb: &[f64]) -> Result<Vec<f64>> {
        let q = self.dim();
        if atb.len() != q {
            return Err(Error::Shape(alloc::format!(
                "nnls: expected Aᵀb of length {q}, got {}",
                atb.len()
            )));
        }
        let max_iter = 3 * q;
        let tol = DUAL_TOL * (1.0 + max_abs(atb));

        let mut x = vec![0.0; q];
        let mut passive = vec![false; q];
        let mut dual = atb.to_vec();
        let mut outer = 0;
        let mut inner = 0;

        loop {
            let candidate = (0..q)
                .filter(|&i| !passive[i])
                .max_by(|&i, &j| dual[i].total_cmp(&dual[j]));
            let j = match candidate {
                Some(j) if dual[j] > tol => j,
                _ => break,
            };
            outer += 1;
            if outer > max_iter {
                return Err(Error::Convergence {
                    iterations: outer + inner,
                    best: x,
                    index: None,
                });
            }
            passive[j] = true;
            let mut s = self.solve_passive(atb, &passive)?;

            while let Some((alpha, blocking)) = step_length(&x, &s, &passive) {
                inner += 1;
                if inner > max_iter {
                    return Err(Error::Convergence {
                        iterations: outer + inner,
                        best: x,
                        index: None,
                    });
                }
                for i in 0..q {
                    if passive[i] {
                        x[i] += alpha * (s[i] - x[i]);
                    }
                }
                x[blocking] = 0.0;
                for i in 0..q {
                    if passive[i] && x[i] <= 0.0 {
                        passive[i] = false;
                        x[i] = 0.0;
                    }
                }
                s = self.solve_passive(atb, &passive)?;
            }
            x = s;
            for (i, d) in dual.iter_mut().enumerate() {
                let gx: f64 = self.gram.row(i).iter().zip(&x).map(|(g, v)| g * v).sum();
                *d = atb[i] - gx;
            }
        }
        Ok(x)
    }

    /// Unconstrained solve of `G_PP·s_P = (Aᵀb)_P`, zero off the passive set.
    fn solve_passive(&self, atb: &[f64], passive: &[bool]) -> Result<Vec<f64>> {
        let idx: Vec<usize> = (0..passive.len()).filter(|&i| passive[i]).collect();
        let mut s = vec![0.0; passive.len()];
        if idx.is_empty() {
            return Ok(s);
        }
        let k = idx.len();
        let sub = DenseMatrix::from_fn(k, k, |a, b| self.gram[(idx[a], idx[b])]);
        let rhs: Vec<f64> = idx.iter().map(|&i| atb[i]).collect();
        let sol = match cholesky_solve(&sub, &rhs) {
            Some(v) => v,
            None => lstsq(&sub, &rhs)?,
        };
        for (&i, v) in idx.iter().zip(sol) {
            s[i] = v;
        }
        Ok(s)
    }
}

/// Largest step toward `s` that keeps the passive set feasible, together with
/// the blocking index. `None` when `s` is already strictly positive on it.
fn step_length(x: &[f64], s: &[f64], passive: &[bool]) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for i in 0..x.len() {
        if passive[i] && s[i] <= 0.0 {
            let alpha = x[i] / (x[i] - s[i]);
            if best.is_none_or(|(b, _)| alpha < b) {
                best = Some((alpha, i));
            }
        }
    }
    best
}

/// Cholesky solve of a symmetric system; `None` when it is not numerically
/// positive definite.
fn cholesky_solve(g: &DenseMatrix, rhs: &[f64]) -> Option<Vec<f64>> {
    let k = g.rows();
    let scale = (0..k).fold(0.0_f64, |m, i| m.max(g[(i, i)]));
    if scale <= 0.0 {
        return None;
    }
    let floor = 1e-13 * scale;
    let mut l = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..=i {
            let mut sum = g[(i, j)];
            for p in 0..j {
                sum -= l[(i, p)] * l[(j, p)];
            }
            if i == j {
                if sum <= floor {
                    return None;
                }
                l[(i, i)] = libm::sqrt(sum);
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    let mut y = vec![0.0; k];
    for i in 0..k {
        let mut sum = rhs[i];
        for p in 0..i {
            sum -= l[(i, p)] * y[p];
        }
        y[i] = sum / l[(i, i)];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut sum = y[i];
        for p in (i + 1)..k {
            sum -= l[(p, i)] * x[p];
        }
        x[i] = sum / l[(i, i)];
    }
    Some(x)
}

/// Nonnegative least squares: `argmin_{x ≥ 0} ‖A·x − b‖²`.
///
/// Fails with [`Error::InvalidArgument`] on empty or non-finite input, and
/// with [`Error::Convergence`] (carrying the last feasible iterate) when the
/// active set does not settle within `3·q` iterations.
pub fn nnls(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let (p, q) = a.shape();
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "nnls needs a non-empty matrix, got {p}x{q}"
        )));
    }
    if b.len() != p {
        return Err(Error::Shape(alloc::format!(
            "nnls: matrix has {p} rows, right-hand side has {}",
            b.len()
        )));
    }
    if !a.is_finite() || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("nnls: non-finite input".into()));
    }
    GramNnls::new(a).solve(&a.tr_matvec(b)?)
}
