use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix};

/// Floor applied to every entry of `H` after an `H` update.
pub const H_FLOOR: f64 = 1e-10;

/// A fitted or in-progress model: topic encodings `W` (n×r), topics `H`
/// (r×m) and regression coefficients `θ` (intercept first, length r+1).
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub w: DenseMatrix,
    pub h: DenseMatrix,
    pub theta: Vec<f64>,
}

/// The three parts of the coupled objective `F = N + λ·R`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Objective {
    /// `F = N + λ·R`
    pub f: f64,
    /// Reconstruction error `‖X − W·H‖²_F`.
    pub n: f64,
    /// Regression error `‖W̄·θ − Y‖²`.
    pub r: f64,
}

impl Factorization {
    pub fn rank(&self) -> usize {
        self.h.rows()
    }

    /// Checks internal consistency and agreement with data of shape `n × m`.
    pub fn check_shapes(&self, n: usize, m: usize) -> Result<()> {
        let r = self.rank();
        if self.w.shape() != (n, r) || self.h.shape() != (r, m) || self.theta.len() != r + 1 {
            return Err(Error::Shape(alloc::format!(
                "factorization W {}x{}, H {}x{}, theta {} does not fit data {n}x{m}",
                self.w.rows(),
                self.w.cols(),
                self.h.rows(),
                self.h.cols(),
                self.theta.len()
            )));
        }
        Ok(())
    }

    /// `θ₁ + w·θ_{2:r+1}` for one topic encoding.
    pub fn response(theta: &[f64], w: &[f64]) -> f64 {
        theta[0] + dot(w, &theta[1..])
    }
}

/// Evaluates `F`, `N` and `R` at `fac`.
pub fn objective(
    fac: &Factorization,
    x: &DenseMatrix,
    y: &[f64],
    lambda: f64,
) -> Result<Objective> {
    let (n, m) = x.shape();
    fac.check_shapes(n, m)?;
    if y.len() != n {
        return Err(Error::Shape(alloc::format!(
            "response has length {}, data has {n} rows",
            y.len()
        )));
    }
    let r = fac.rank();
    let mut recon = 0.0;
    let mut row = alloc::vec![0.0; m];
    for i in 0..n {
        row.copy_from_slice(x.row(i));
        let wi = fac.w.row(i);
        for (k, &a) in wi.iter().enumerate().take(r) {
            if a == 0.0 {
                continue;
            }
            for (o, &hv) in row.iter_mut().zip(fac.h.row(k)) {
                *o -= a * hv;
            }
        }
        recon += row.iter().map(|v| v * v).sum::<f64>();
    }
    let reg = regression_error(&fac.w, &fac.theta, y);
    Ok(Objective {
        f: recon + lambda * reg,
        n: recon,
        r: reg,
    })
}

/// `‖W̄·θ − Y‖²` with `W̄ = [1 | W]`.
pub fn regression_error(w: &DenseMatrix, theta: &[f64], y: &[f64]) -> f64 {
    w.row_iter()
        .zip(y)
        .map(|(wi, &yi)| {
            let e = Factorization::response(theta, wi) - yi;
            e * e
        })
        .sum()
}

/// Rescales so every row of `H` sums to one: `W ← W·S`, `H ← S⁻¹·H`,
/// `θ_{2:} ← S⁻¹·θ_{2:}` with `S` the diagonal of row sums. `W·H` and `W̄·θ`
/// are unchanged.
pub fn normalize(fac: &Factorization) -> Result<Factorization> {
    let r = fac.rank();
    let mut out = fac.clone();
    for k in 0..r {
        let s: f64 = fac.h.row(k).iter().sum();
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Invariant(alloc::format!(
                "topic {k} has row sum {s}; cannot normalize"
            )));
        }
        for v in out.h.row_mut(k) {
            *v /= s;
        }
        for i in 0..out.w.rows() {
            out.w[(i, k)] *= s;
        }
        out.theta[k + 1] /= s;
    }
    Ok(out)
}
