//! Grid sweeps over topic count and regression weight.

use std::path::Path;

use cssnmf_core::model::{regression_error, FitConfig, FitReport, Predictor};
use cssnmf_core::synthetic::{split, TrainTest};
use cssnmf_core::{DenseMatrix, Factorization};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::io::{fmt_f64, write_table};
use crate::parallel::fit_parallel;

/// Ratio above which the plot-ready output hides a point.
pub const FIGURE_FILTER_RATIO: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub r_values: Vec<usize>,
    pub lambda_values: Vec<f64>,
    pub restarts: usize,
    pub split_seed: u64,
    pub fit_seed: u64,
    pub train_frac: f64,
    pub tau: f64,
    pub max_iter: usize,
}

impl SweepSpec {
    /// Sorts and deduplicates the grids, then checks them.
    pub fn normalized(mut self) -> Result<Self> {
        if self.r_values.is_empty() || self.lambda_values.is_empty() {
            return Err(CliError::Usage(
                "sweep needs at least one r and one lambda".into(),
            ));
        }
        if self.r_values.contains(&0) {
            return Err(CliError::Usage("r values must be at least 1".into()));
        }
        if self
            .lambda_values
            .iter()
            .any(|l| !(*l >= 0.0 && l.is_finite()))
        {
            return Err(CliError::Usage(
                "lambda values must be finite and nonnegative".into(),
            ));
        }
        self.r_values.sort_unstable();
        self.r_values.dedup();
        self.lambda_values.sort_by(f64::total_cmp);
        self.lambda_values.dedup();
        Ok(self)
    }

    fn fit_config(&self, rank: usize, lambda: f64) -> FitConfig {
        FitConfig {
            rank,
            lambda,
            tau: self.tau,
            max_iter: self.max_iter,
            seed: self.fit_seed,
            restarts: self.restarts,
        }
    }
}

fn pow10(num: i32, den: i32) -> f64 {
    if num % den == 0 {
        10f64.powi(num / den)
    } else {
        10f64.powf(num as f64 / den as f64)
    }
}

/// `{0} ∪ {10^(i/2) : i = −8..8}`, the synthetic-study grid.
pub fn synthetic_lambda_grid() -> Vec<f64> {
    std::iter::once(0.0)
        .chain((-8..=8).map(|i| pow10(i, 2)))
        .collect()
}

/// `{0} ∪ {10^(2i/3) : i = −12..0}`, the text-study grid.
pub fn text_lambda_grid() -> Vec<f64> {
    std::iter::once(0.0)
        .chain((-12..=0).map(|i| pow10(2 * i, 3)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub r: usize,
    pub lambda: f64,
    pub train_n: f64,
    pub train_r: f64,
    pub train_r_mse: f64,
    pub test_r_mse: f64,
    pub final_f: f64,
    pub best_restart: usize,
    pub iterations: usize,
    pub converged: bool,
    /// `None` on success, otherwise the reason the cell failed.
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub row: SweepRow,
    pub config: FitConfig,
    pub model: Option<(Factorization, FitReport)>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
}

impl SweepResult {
    pub fn rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.cells.iter().map(|c| &c.row)
    }
}

/// Mean squared error of `predictor` over the rows of `x`.
pub fn test_mse(predictor: &Predictor<'_>, x: &DenseMatrix, y: &[f64]) -> Result<f64> {
    let preds = predictor.predict_rows(x)?;
    let sse: f64 = preds
        .iter()
        .zip(y)
        .map(|(p, t)| (p.y_hat - t).powi(2))
        .sum();
    Ok(sse / y.len() as f64)
}

fn run_cell(data: &TrainTest, spec: &SweepSpec, r: usize, lambda: f64) -> SweepCell {
    let config = spec.fit_config(r, lambda);
    let evaluated = fit_parallel(&data.x_train, &data.y_train, &config).and_then(|(fac, rep)| {
        let predictor = Predictor::new(&fac.h, &fac.theta)?;
        let test = test_mse(&predictor, &data.x_test, &data.y_test)?;
        Ok((fac, rep, test))
    });
    match evaluated {
        Ok((fac, rep, test)) => {
            let last = rep.objective_trace.last().copied();
            let train_r = regression_error(&fac.w, &fac.theta, &data.y_train);
            let row = SweepRow {
                r,
                lambda,
                train_n: last.map_or(f64::NAN, |p| p.n),
                train_r,
                train_r_mse: train_r / data.y_train.len() as f64,
                test_r_mse: test,
                final_f: rep.final_objective,
                best_restart: rep.restart_index,
                iterations: rep.iterations_run,
                converged: rep.converged,
                failure: None,
            };
            SweepCell {
                row,
                config,
                model: Some((fac, rep)),
            }
        }
        Err(e) => SweepCell {
            row: SweepRow {
                r,
                lambda,
                train_n: f64::NAN,
                train_r: f64::NAN,
                train_r_mse: f64::NAN,
                test_r_mse: f64::NAN,
                final_f: f64::NAN,
                best_restart: 0,
                iterations: 0,
                converged: false,
                failure: Some(e.to_string()),
            },
            config,
            model: None,
        },
    }
}

/// Fits every `(r, λ)` cell on one seeded train split and scores it on the
/// held-out rows. A failing cell is recorded and the sweep continues.
pub fn run_sweep(x: &DenseMatrix, y: &[f64], spec: &SweepSpec) -> Result<SweepResult> {
    let spec = spec.clone().normalized()?;
    let data = split(x, y, spec.train_frac, spec.split_seed)?;
    let grid: Vec<(usize, f64)> = spec
        .r_values
        .iter()
        .flat_map(|&r| spec.lambda_values.iter().map(move |&l| (r, l)))
        .collect();
    let cells: Vec<SweepCell> = grid
        .par_iter()
        .map(|&(r, lambda)| run_cell(&data, &spec, r, lambda))
        .collect();
    Ok(SweepResult {
        cells,
        train_idx: data.train_idx,
        test_idx: data.test_idx,
    })
}

pub const SWEEP_HEADER: [&str; 11] = [
    "r",
    "lambda",
    "train_N",
    "train_R",
    "train_R_mse",
    "test_R_mse",
    "final_F",
    "best_restart",
    "iterations",
    "converged",
    "status",
];

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let header: Vec<String> = SWEEP_HEADER.iter().map(|s| s.to_string()).collect();
    write_table(
        path,
        &header,
        rows.iter().map(|r| {
            vec![
                r.r.to_string(),
                fmt_f64(r.lambda),
                fmt_f64(r.train_n),
                fmt_f64(r.train_r),
                fmt_f64(r.train_r_mse),
                fmt_f64(r.test_r_mse),
                fmt_f64(r.final_f),
                r.best_restart.to_string(),
                r.iterations.to_string(),
                r.converged.to_string(),
                r.failure.clone().unwrap_or_else(|| "ok".into()),
            ]
        }),
    )
}

/// A sweep point prepared for plotting; hidden values are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct FigurePoint {
    pub r: usize,
    pub lambda: f64,
    pub train_r_mse: Option<f64>,
    pub test_r_mse: Option<f64>,
}

/// Hides λ > 0 values exceeding [`FIGURE_FILTER_RATIO`] times the λ = 0
/// value of the same series and topic count.
pub fn figure_filter(rows: &[SweepRow]) -> Vec<FigurePoint> {
    let base = |r: usize| {
        rows.iter()
            .find(|row| row.r == r && row.lambda == 0.0 && row.failure.is_none())
    };
    rows.iter()
        .filter(|row| row.failure.is_none())
        .map(|row| {
            let keep = |v: f64, b: Option<f64>| match b {
                Some(b) if row.lambda > 0.0 && v > FIGURE_FILTER_RATIO * b => None,
                _ => Some(v),
            };
            let b = base(row.r);
            FigurePoint {
                r: row.r,
                lambda: row.lambda,
                train_r_mse: keep(row.train_r_mse, b.map(|b| b.train_r_mse)),
                test_r_mse: keep(row.test_r_mse, b.map(|b| b.test_r_mse)),
            }
        })
        .collect()
}

pub fn write_figure_csv(path: &Path, points: &[FigurePoint]) -> Result<()> {
    let header: Vec<String> = ["r", "lambda", "train_R_mse", "test_R_mse"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    write_table(
        path,
        &header,
        points.iter().map(|p| {
            vec![
                p.r.to_string(),
                fmt_f64(p.lambda),
                opt(p.train_r_mse),
                opt(p.test_r_mse),
            ]
        }),
    )
}
