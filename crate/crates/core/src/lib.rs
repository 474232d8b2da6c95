//! Nonnegative matrix factorization coupled with linear regression on a
//! continuous response.
//!
//! Given a nonnegative data matrix `X` (n×m) and responses `Y` (length n),
//! the model finds `W ≥ 0` (n×r), `H ≥ 0` (r×m) with unit ℓ1 rows, and
//! regression coefficients `θ` (length r+1, intercept first) minimizing
//!
//! ```text
//! F = ‖X − W·H‖²_F + λ·‖[1 | W]·θ − Y‖²
//! ```
//!
//! by alternating nonnegative least squares. The crate is `no_std` and only
//! needs `alloc`; file formats and the command line live in the `cssnmf`
//! crate.
#![no_std]

extern crate alloc;

mod error;
pub mod linalg;
pub mod model;
pub mod synthetic;
pub mod text;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
pub use model::{fit, predict, Factorization, FitConfig, FitReport};
