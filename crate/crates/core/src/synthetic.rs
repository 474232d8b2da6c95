//! Synthetic `(X, Y)` instances with known nonnegative factors.
//!
//! `W` (n×r) and `H` (r×m) are drawn uniformly on `[0, M)`, `θ` on
//! `[−M/2, M/2)`. Then `X = W·H + noise`, `Y = W̄·θ + noise`, and negative
//! entries of `X` are set to zero.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::model::Factorization;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum NoiseKind {
    /// Elementwise `N(0, η²)`.
    Gaussian,
    /// Elementwise `Unif([0, η))`; not zero-mean.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticConfig {
    pub n: usize,
    pub m: usize,
    pub rank: usize,
    /// Upper bound `M` of the factor entries.
    pub scale: f64,
    pub eta_x: f64,
    pub eta_y: f64,
    pub noise: NoiseKind,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n: 100,
            m: 40,
            rank: 4,
            scale: 20.0,
            eta_x: 4.0,
            eta_y: 4.0,
            noise: NoiseKind::Gaussian,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.rank == 0 {
            return Err(Error::InvalidArgument(
                "n, m and rank must all be at least 1".into(),
            ));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidArgument("scale M must be positive".into()));
        }
        for (name, eta) in [("eta_x", self.eta_x), ("eta_y", self.eta_y)] {
            if !(eta >= 0.0 && eta.is_finite()) {
                return Err(Error::InvalidArgument(alloc::format!(
                    "{name} must be finite and nonnegative"
                )));
            }
        }
        Ok(())
    }

    /// Variance of the response noise: `η²` (Gaussian) or `η²/12` (uniform).
    pub fn response_noise_floor(&self) -> f64 {
        match self.noise {
            NoiseKind::Gaussian => self.eta_y * self.eta_y,
            NoiseKind::Uniform => self.eta_y * self.eta_y / 12.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub x: DenseMatrix,
    pub y: Vec<f64>,
    /// Ground-truth `W`, `H` and `θ`.
    pub truth: Factorization,
    pub config: SyntheticConfig,
}

fn noise(kind: NoiseKind, eta: f64, rng: &mut ChaCha8Rng) -> f64 {
    if eta == 0.0 {
        return 0.0;
    }
    match kind {
        NoiseKind::Gaussian => Normal::new(0.0, eta).expect("eta checked").sample(rng),
        NoiseKind::Uniform => rng.random_range(0.0..eta),
    }
}

/// Draws one dataset. Identical configs give bit-identical output.
pub fn generate(cfg: &SyntheticConfig) -> Result<SyntheticDataset> {
    cfg.validate()?;
    let (n, m, r, scale) = (cfg.n, cfg.m, cfg.rank, cfg.scale);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let w = DenseMatrix::from_fn(n, r, |_, _| rng.random_range(0.0..scale));
    let h = DenseMatrix::from_fn(r, m, |_, _| rng.random_range(0.0..scale));
    let theta: Vec<f64> = (0..=r)
        .map(|_| rng.random_range(-scale / 2.0..scale / 2.0))
        .collect();

    let mut x = w.matmul(&h)?;
    for v in x.as_mut_slice() {
        *v += noise(cfg.noise, cfg.eta_x, &mut rng);
    }
    let y: Vec<f64> = w
        .row_iter()
        .map(|wi| Factorization::response(&theta, wi) + noise(cfg.noise, cfg.eta_y, &mut rng))
        .collect();
    for v in x.as_mut_slice() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }

    Ok(SyntheticDataset {
        x,
        y,
        truth: Factorization { w, h, theta },
        config: cfg.clone(),
    })
}

/// Row indices of a seeded train/test partition. Both sides are sorted.
pub fn split_indices(n: usize, train_frac: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "train fraction must lie in (0, 1), got {train_frac}"
        )));
    }
    let n_train = libm::round(train_frac * n as f64) as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::InvalidArgument(alloc::format!(
            "splitting {n} rows at {train_frac} leaves one side empty"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test = idx.split_off(n_train);
    idx.sort_unstable();
    test.sort_unstable();
    Ok((idx, test))
}

/// Materialized train/test partition.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainTest {
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    pub x_train: DenseMatrix,
    pub y_train: Vec<f64>,
    pub x_test: DenseMatrix,
    pub y_test: Vec<f64>,
}

pub fn split(x: &DenseMatrix, y: &[f64], train_frac: f64, seed: u64) -> Result<TrainTest> {
    if y.len() != x.rows() {
        return Err(Error::Shape(alloc::format!(
            "response has length {}, data has {} rows",
            y.len(),
            x.rows()
        )));
    }
    let (train_idx, test_idx) = split_indices(x.rows(), train_frac, seed)?;
    let pick = |idx: &[usize]| idx.iter().map(|&i| y[i]).collect::<Vec<_>>();
    Ok(TrainTest {
        x_train: x.select_rows(&train_idx),
        y_train: pick(&train_idx),
        x_test: x.select_rows(&test_idx),
        y_test: pick(&test_idx),
        train_idx,
        test_idx,
    })
}
