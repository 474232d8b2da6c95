//! Small dense linear algebra: matrices, least squares and NNLS.

mod lstsq;
mod matrix;
mod nnls;

pub use lstsq::{lstsq, JacobiSvd, RANK_CUTOFF};
pub use matrix::{dot, frob_sq, max_abs, norm_sq, DenseMatrix};
pub use nnls::{nnls, GramNnls, DUAL_TOL};
