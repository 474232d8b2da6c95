use alloc::vec::Vec;

use super::factorization::Factorization;
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, GramNnls};

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub y_hat: f64,
    /// Nonnegative topic encoding of the document.
    pub w: Vec<f64>,
}

/// Encodes documents in a fixed topic basis and applies the linear model.
///
/// The Gram matrix `H·Hᵀ` is computed once and reused for every document.
#[derive(Debug, Clone)]
pub struct Predictor<'a> {
    h: &'a DenseMatrix,
    theta: &'a [f64],
    solver: GramNnls,
}

impl<'a> Predictor<'a> {
    pub fn new(h: &'a DenseMatrix, theta: &'a [f64]) -> Result<Self> {
        if theta.len() != h.rows() + 1 {
            return Err(Error::Shape(alloc::format!(
                "theta has length {}, expected {} for {} topics",
                theta.len(),
                h.rows() + 1,
                h.rows()
            )));
        }
        if h.rows() == 0 || h.cols() == 0 {
            return Err(Error::InvalidArgument("empty topic matrix".into()));
        }
        Ok(Self {
            h,
            theta,
            solver: GramNnls::new(&h.transpose()),
        })
    }

    /// `w = argmin_{w ≥ 0} ‖w·H − x‖²`, `ŷ = θ₁ + w·θ_{2:}`.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.h.cols() {
            return Err(Error::InvalidArgument(alloc::format!(
                "document has {} terms, model vocabulary has {}",
                x.len(),
                self.h.cols()
            )));
        }
        if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "document vector must be finite and nonnegative".into(),
            ));
        }
        let hx = self.h.matvec(x)?;
        let w = self.solver.solve(&hx)?;
        Ok(Prediction {
            y_hat: Factorization::response(self.theta, &w),
            w,
        })
    }

    /// Predicts every row of `x`.
    pub fn predict_rows(&self, x: &DenseMatrix) -> Result<Vec<Prediction>> {
        x.row_iter()
            .enumerate()
            .map(|(i, row)| self.predict(row).map_err(|e| e.at_index(i)))
            .collect()
    }
}

/// One-shot prediction for a single document.
pub fn predict(h: &DenseMatrix, theta: &[f64], x: &[f64]) -> Result<Prediction> {
    Predictor::new(h, theta)?.predict(x)
}
