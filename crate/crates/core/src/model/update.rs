//! The three block updates of the alternating scheme.

use alloc::vec::Vec;

use super::factorization::H_FLOOR;
use crate::error::{Error, Result};
use crate::linalg::{lstsq, DenseMatrix, GramNnls};

/// Least-squares regression coefficients for `W̄·θ ≈ Y`, `W̄ = [1 | W]`.
///
/// Rank-deficient `W̄` yields the minimum-norm solution.
pub fn update_theta(w: &DenseMatrix, y: &[f64]) -> Result<Vec<f64>> {
    let (n, r) = w.shape();
    if y.len() != n {
        return Err(Error::Shape(alloc::format!(
            "W has {n} rows, response has length {}",
            y.len()
        )));
    }
    let w_bar = DenseMatrix::from_fn(n, r + 1, |i, j| if j == 0 { 1.0 } else { w[(i, j - 1)] });
    lstsq(&w_bar, y)
}

/// Column-wise NNLS for `H` against the dictionary `W`, followed by the
/// `H_FLOOR` clamp.
pub fn update_h(x: &DenseMatrix, w: &DenseMatrix) -> Result<DenseMatrix> {
    let (n, m) = x.shape();
    let r = w.cols();
    if w.rows() != n {
        return Err(Error::Shape(alloc::format!(
            "W has {} rows, X has {n}",
            w.rows()
        )));
    }
    let solver = GramNnls::new(w);
    // WᵀX, one column per right-hand side
    let wtx = w.transpose().matmul(x)?;
    let mut h = DenseMatrix::zeros(r, m);
    let mut rhs = alloc::vec![0.0; r];
    for j in 0..m {
        for k in 0..r {
            rhs[k] = wtx[(k, j)];
        }
        let col = solver.solve(&rhs).map_err(|e| e.at_index(j))?;
        for (k, v) in col.into_iter().enumerate() {
            h[(k, j)] = v.max(H_FLOOR);
        }
    }
    Ok(h)
}

/// Row-wise NNLS for `W` on the augmented system
/// `X̄ = [X | √λ(Y − θ₁)]`, `H̄ = [H | √λ·θ_{2:}]`, so that
/// `‖X̄_i − w·H̄‖² = ‖X_i − w·H‖² + λ(θ₁ + w·θ_{2:} − Y_i)²`.
///
/// With `λ = 0` this is the plain NMF row update.
pub fn update_w(
    x: &DenseMatrix,
    y: &[f64],
    h: &DenseMatrix,
    theta: &[f64],
    lambda: f64,
) -> Result<DenseMatrix> {
    let (n, m) = x.shape();
    let r = h.rows();
    if h.cols() != m || y.len() != n || theta.len() != r + 1 {
        return Err(Error::Shape(alloc::format!(
            "update_w: X {n}x{m}, Y {}, H {}x{}, theta {}",
            y.len(),
            h.rows(),
            h.cols(),
            theta.len()
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "lambda must be finite and nonnegative, got {lambda}"
        )));
    }
    let slope = &theta[1..];

    // H̄·H̄ᵀ = H·Hᵀ + λ·θ̄·θ̄ᵀ
    let mut gram = h.transpose().gram();
    for a in 0..r {
        for b in 0..r {
            gram[(a, b)] += lambda * slope[a] * slope[b];
        }
    }
    let solver = GramNnls::from_gram(gram);
    // rows of X·Hᵀ
    let xht = x.matmul(&h.transpose())?;

    let mut w = DenseMatrix::zeros(n, r);
    let mut rhs = alloc::vec![0.0; r];
    for i in 0..n {
        let target = lambda * (y[i] - theta[0]);
        for k in 0..r {
            rhs[k] = xht[(i, k)] + target * slope[k];
        }
        let row = solver.solve(&rhs).map_err(|e| e.at_index(i))?;
        w.row_mut(i).copy_from_slice(&row);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::nnls;
    use crate::model::{objective, Factorization};
    use alloc::vec::Vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(
        seed: u64,
        n: usize,
        m: usize,
        r: usize,
    ) -> (DenseMatrix, Vec<f64>, Factorization) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DenseMatrix::from_fn(n, m, |_, _| rng.random_range(0.0..5.0));
        let y = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let fac = Factorization {
            w: DenseMatrix::from_fn(n, r, |_, _| rng.random_range(0.0..2.0)),
            h: DenseMatrix::from_fn(r, m, |_, _| rng.random_range(0.0..2.0)),
            theta: (0..=r).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        (x, y, fac)
    }

    #[test]
    fn theta_interpolates() {
        let w = DenseMatrix::from_rows(&[[1.0], [2.0]]).unwrap();
        let t = update_theta(&w, &[3.0, 5.0]).unwrap();
        assert!((t[0] - 1.0).abs() < 1e-12 && (t[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn theta_with_zero_encodings_is_intercept_only() {
        let w = DenseMatrix::zeros(4, 3);
        let t = update_theta(&w, &[1.0, 2.0, 3.0, 6.0]).unwrap();
        assert!((t[0] - 3.0).abs() < 1e-12);
        assert!(t[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn theta_is_locally_optimal() {
        let (_, y, fac) = random_instance(11, 8, 4, 3);
        let t = update_theta(&fac.w, &y).unwrap();
        let base = super::super::factorization::regression_error(&fac.w, &t, &y);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let mut d: Vec<f64> = (0..t.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = libm::sqrt(d.iter().map(|v| v * v).sum::<f64>());
            d.iter_mut().for_each(|v| *v *= 1e-3 / norm);
            let moved: Vec<f64> = t.iter().zip(&d).map(|(a, b)| a + b).collect();
            assert!(base <= super::super::factorization::regression_error(&fac.w, &moved, &y));
        }
    }

    #[test]
    fn h_identity_dictionary() {
        let h_true = DenseMatrix::from_rows(&[[0.0, 1.0, 2.0], [3.0, 0.0, 1e-12]]).unwrap();
        let h = update_h(&h_true, &DenseMatrix::identity(2)).unwrap();
        for (a, b) in h.as_slice().iter().zip(h_true.as_slice()) {
            assert!((a - b.max(H_FLOOR)).abs() < 1e-12);
        }
    }

    #[test]
    fn h_zero_target_clamps() {
        let w = DenseMatrix::from_rows(&[[1.0, 2.0], [0.5, 1.0], [3.0, 0.0]]).unwrap();
        let h = update_h(&DenseMatrix::zeros(3, 4), &w).unwrap();
        assert!(h.as_slice().iter().all(|&v| v == H_FLOOR));
    }

    #[test]
    fn h_update_lowers_reconstruction() {
        let (x, y, fac) = random_instance(3, 6, 4, 2);
        let before = objective(&fac, &x, &y, 0.0).unwrap().n;
        let h = update_h(&x, &fac.w).unwrap();
        let after = objective(&Factorization { h, ..fac }, &x, &y, 0.0)
            .unwrap()
            .n;
        assert!(after <= before);
    }

    #[test]
    fn h_columns_match_plain_nnls() {
        let (x, _, fac) = random_instance(5, 7, 5, 3);
        let h = update_h(&x, &fac.w).unwrap();
        for j in 0..5 {
            let col = nnls(&fac.w, &x.col(j)).unwrap();
            for k in 0..3 {
                assert!((h[(k, j)] - col[k].max(H_FLOOR)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn w_without_regression_is_plain_nmf_row() {
        let x = DenseMatrix::from_rows(&[[1.0, 0.0, 2.0]]).unwrap();
        let w = update_w(
            &x,
            &[7.0],
            &DenseMatrix::identity(3),
            &[0.0, 1.0, 1.0, 1.0],
            0.0,
        )
        .unwrap();
        assert!(w
            .row(0)
            .iter()
            .zip([1.0, 0.0, 2.0])
            .all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn w_follows_response_for_large_lambda() {
        let x = DenseMatrix::from_rows(&[[0.3, 0.1, 0.2], [0.0, 0.4, 0.1]]).unwrap();
        let h = DenseMatrix::from_rows(&[[H_FLOOR; 3]]).unwrap();
        let y = [2.5, 0.75];
        let w = update_w(&x, &y, &h, &[0.0, 1.0], 1e12).unwrap();
        assert!((w[(0, 0)] - 2.5).abs() < 1e-6);
        assert!((w[(1, 0)] - 0.75).abs() < 1e-6);
    }

    #[test]
    fn w_update_lowers_objective() {
        let (x, y, fac) = random_instance(9, 5, 6, 2);
        let before = objective(&fac, &x, &y, 1.0).unwrap().f;
        let w = update_w(&x, &y, &fac.h, &fac.theta, 1.0).unwrap();
        let after = objective(&Factorization { w, ..fac }, &x, &y, 1.0)
            .unwrap()
            .f;
        assert!(after <= before);
    }

    #[test]
    fn w_rows_match_augmented_nnls() {
        // explicit augmented system, solved row by row with the plain solver
        let (x, y, fac) = random_instance(21, 4, 5, 2);
        let lambda = 2.5;
        let s = libm::sqrt(lambda);
        let w = update_w(&x, &y, &fac.h, &fac.theta, lambda).unwrap();
        let h_bar_t = DenseMatrix::from_fn(6, 2, |j, k| {
            if j < 5 {
                fac.h[(k, j)]
            } else {
                s * fac.theta[k + 1]
            }
        });
        for i in 0..4 {
            let mut b = x.row(i).to_vec();
            b.push(s * (y[i] - fac.theta[0]));
            let row = nnls(&h_bar_t, &b).unwrap();
            for k in 0..2 {
                assert!(
                    (w[(i, k)] - row[k]).abs() < 1e-9,
                    "row {i}: {:?} vs {:?}",
                    w.row(i),
                    row
                );
            }
        }
    }
}
