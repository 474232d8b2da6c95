//! Reference computations that share no code with the library solvers.
#![allow(dead_code)]

/// Solves the square system `m·x = rhs` by Gaussian elimination with partial
/// pivoting. `None` if a pivot vanishes.
pub fn gauss_solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let k = rhs.len();
    for c in 0..k {
        let p = (c..k).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[p][c].abs() < 1e-13 {
            return None;
        }
        m.swap(c, p);
        rhs.swap(c, p);
        for r in (c + 1)..k {
            let f = m[r][c] / m[c][c];
            let (top, bottom) = m.split_at_mut(r);
            for (v, &p) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                *v -= f * p;
            }
            rhs[r] -= f * rhs[c];
        }
    }
    let mut x = vec![0.0; k];
    for c in (0..k).rev() {
        let s: f64 = ((c + 1)..k).map(|j| m[c][j] * x[j]).sum();
        x[c] = (rhs[c] - s) / m[c][c];
    }
    Some(x)
}

/// `‖A·x − b‖²` for row-major `a` with `q` columns.
pub fn residual_sq(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(row, bi)| {
            let ax: f64 = row.iter().zip(x).map(|(u, v)| u * v).sum();
            (ax - bi) * (ax - bi)
        })
        .sum()
}

/// Exhaustive NNLS: every support set is solved as unconstrained least
/// squares on its columns, infeasible ones are discarded, and the best
/// objective wins.
pub fn brute_force_nnls(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let q = a[0].len();
    let mut best = vec![0.0; q];
    let mut best_obj = residual_sq(a, b, &best);
    for mask in 1u32..(1 << q) {
        let cols: Vec<usize> = (0..q).filter(|j| mask & (1 << j) != 0).collect();
        let normal: Vec<Vec<f64>> = cols
            .iter()
            .map(|&i| {
                cols.iter()
                    .map(|&j| a.iter().map(|row| row[i] * row[j]).sum())
                    .collect()
            })
            .collect();
        let rhs: Vec<f64> = cols
            .iter()
            .map(|&i| a.iter().zip(b).map(|(row, bi)| row[i] * bi).sum())
            .collect();
        let Some(sol) = gauss_solve(normal, rhs) else {
            continue;
        };
        if sol.iter().any(|&v| v < 0.0) {
            continue;
        }
        let mut x = vec![0.0; q];
        for (&j, v) in cols.iter().zip(sol) {
            x[j] = v;
        }
        let obj = residual_sq(a, b, &x);
        if obj < best_obj {
            best_obj = obj;
            best = x;
        }
    }
    best
}

/// `‖X − W·H‖²_F + λ·Σ_i (θ₁ + Σ_k W_ik θ_{k+1} − Y_i)²` with explicit loops.
pub fn naive_objective(
    x: &[Vec<f64>],
    y: &[f64],
    w: &[Vec<f64>],
    h: &[Vec<f64>],
    theta: &[f64],
    lambda: f64,
) -> (f64, f64, f64) {
    let (n, m, r) = (x.len(), x[0].len(), h.len());
    let mut recon = 0.0;
    for i in 0..n {
        for j in 0..m {
            let mut wh = 0.0;
            for k in 0..r {
                wh += w[i][k] * h[k][j];
            }
            recon += (x[i][j] - wh) * (x[i][j] - wh);
        }
    }
    let mut reg = 0.0;
    for i in 0..n {
        let mut pred = theta[0];
        for k in 0..r {
            pred += w[i][k] * theta[k + 1];
        }
        reg += (pred - y[i]) * (pred - y[i]);
    }
    (recon + lambda * reg, recon, reg)
}
