//! The outer alternating loop with descent guards and random restarts.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::factorization::{normalize, objective, Factorization, Objective, H_FLOOR};
use super::update::{update_h, update_theta, update_w};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Hyperparameters of a fit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitConfig {
    /// Number of topics `r`.
    pub rank: usize,
    /// Regression weight `λ`.
    pub lambda: f64,
    /// Relative change of `F` between iterations below which the loop stops.
    pub tau: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            rank: 4,
            lambda: 0.0,
            tau: 1e-4,
            max_iter: 100,
            seed: 0,
            restarts: 10,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if self.rank == 0 {
            return bad("rank must be at least 1");
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be finite and nonnegative");
        }
        if self.tau.is_nan() || self.tau <= 0.0 {
            return bad("tau must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        Ok(())
    }
}

/// Objective values after one pass of the loop (iteration 0 is the
/// initialization).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TracePoint {
    pub iteration: usize,
    pub f: f64,
    pub n: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitReport {
    pub objective_trace: Vec<TracePoint>,
    pub final_objective: f64,
    pub iterations_run: usize,
    pub converged: bool,
    pub restart_index: usize,
    /// Sub-steps discarded because they would have raised `F`.
    pub rejected_steps: usize,
    /// Sub-steps discarded because an NNLS solve hit its iteration cap.
    pub failed_steps: usize,
    /// Set when `r > min(n, m)`.
    pub rank_exceeds_data: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    W,
    H,
    Theta,
    Normalize,
}

/// One sub-step of the loop, as seen by an observer.
#[derive(Debug)]
pub struct StepEvent<'a> {
    pub iteration: usize,
    pub step: Step,
    pub before: Objective,
    /// `None` when the update itself failed.
    pub after: Option<Objective>,
    pub accepted: bool,
    /// The proposed state.
    pub candidate: Option<&'a Factorization>,
}

fn check_data(x: &DenseMatrix, y: &[f64]) -> Result<()> {
    let (n, m) = x.shape();
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "data matrix must be non-empty, got {n}x{m}"
        )));
    }
    if !x.is_finite() || !x.is_nonnegative() {
        return Err(Error::InvalidArgument(
            "data matrix must be finite and nonnegative".into(),
        ));
    }
    if y.len() != n {
        return Err(Error::Shape(alloc::format!(
            "response has length {}, data has {n} rows",
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("response must be finite".into()));
    }
    Ok(())
}

/// Uniform `[0, ‖X‖_max)` draws for `W`, `H` and `θ`, in that order.
pub fn initialize(x: &DenseMatrix, rank: usize, rng: &mut impl Rng) -> Factorization {
    let (n, m) = x.shape();
    let scale = match x.max_abs() {
        s if s > 0.0 => s,
        _ => 1.0,
    };
    let w = DenseMatrix::from_fn(n, rank, |_, _| rng.random_range(0.0..scale));
    let h = DenseMatrix::from_fn(rank, m, |_, _| rng.random_range(0.0..scale).max(H_FLOOR));
    let theta = (0..=rank).map(|_| rng.random_range(0.0..scale)).collect();
    Factorization { w, h, theta }
}

/// One run of the alternating loop from the initialization seeded with
/// `cfg.seed + restart`.
pub fn fit_restart(
    x: &DenseMatrix,
    y: &[f64],
    cfg: &FitConfig,
    restart: usize,
) -> Result<(Factorization, FitReport)> {
    fit_restart_observed(x, y, cfg, restart, &mut |_| {})
}

/// [`fit_restart`] with a callback invoked after every sub-step.
pub fn fit_restart_observed(
    x: &DenseMatrix,
    y: &[f64],
    cfg: &FitConfig,
    restart: usize,
    observer: &mut dyn FnMut(&StepEvent<'_>),
) -> Result<(Factorization, FitReport)> {
    cfg.validate()?;
    check_data(x, y)?;
    let (n, m) = x.shape();
    let lambda = cfg.lambda;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
    let mut fac = initialize(x, cfg.rank, &mut rng);
    let mut current = objective(&fac, x, y, lambda)?;

    let mut report = FitReport {
        objective_trace: alloc::vec![TracePoint {
            iteration: 0,
            f: current.f,
            n: current.n,
            r: current.r,
        }],
        final_objective: current.f,
        iterations_run: 0,
        converged: false,
        restart_index: restart,
        rejected_steps: 0,
        failed_steps: 0,
        rank_exceeds_data: cfg.rank > n.min(m),
    };

    let mut err = f64::INFINITY;
    let mut rel_err = f64::INFINITY;
    let mut iter = 0;
    while rel_err > cfg.tau && iter < cfg.max_iter {
        iter += 1;

        let cand =
            update_w(x, y, &fac.h, &fac.theta, lambda).map(|w| Factorization { w, ..fac.clone() });
        guarded(
            &mut fac,
            &mut current,
            cand,
            x,
            y,
            lambda,
            iter,
            Step::W,
            &mut report,
            observer,
        )?;

        let cand = update_h(x, &fac.w).map(|h| Factorization { h, ..fac.clone() });
        guarded(
            &mut fac,
            &mut current,
            cand,
            x,
            y,
            lambda,
            iter,
            Step::H,
            &mut report,
            observer,
        )?;

        // With λ = 0, θ has no influence on F; it is fit once after the loop.
        if lambda > 0.0 {
            let cand = update_theta(&fac.w, y).map(|theta| Factorization {
                theta,
                ..fac.clone()
            });
            guarded(
                &mut fac,
                &mut current,
                cand,
                x,
                y,
                lambda,
                iter,
                Step::Theta,
                &mut report,
                observer,
            )?;
        }

        let cand = normalize(&fac);
        guarded(
            &mut fac,
            &mut current,
            cand,
            x,
            y,
            lambda,
            iter,
            Step::Normalize,
            &mut report,
            observer,
        )?;

        let err_temp = current.f;
        if err < f64::INFINITY {
            rel_err = if err == 0.0 {
                0.0
            } else {
                (err - err_temp).abs() / err
            };
        }
        err = err_temp;
        report.objective_trace.push(TracePoint {
            iteration: iter,
            f: current.f,
            n: current.n,
            r: current.r,
        });
    }

    if lambda == 0.0 {
        let theta = update_theta(&fac.w, y)?;
        let before = current;
        fac.theta = theta;
        current = objective(&fac, x, y, lambda)?;
        observer(&StepEvent {
            iteration: iter,
            step: Step::Theta,
            before,
            after: Some(current),
            accepted: true,
            candidate: Some(&fac),
        });
        // the last row describes the returned model
        if let Some(last) = report.objective_trace.last_mut() {
            last.r = current.r;
        }
    }

    if !current.f.is_finite() {
        return Err(Error::Numeric(alloc::format!(
            "restart {restart} ended with non-finite objective"
        )));
    }
    report.final_objective = current.f;
    report.iterations_run = iter;
    report.converged = rel_err <= cfg.tau;
    Ok((fac, report))
}

/// Accepts `cand` only if it does not raise `F`. Errors other than an NNLS
/// iteration cap abort the run.
#[allow(clippy::too_many_arguments)]
fn guarded(
    fac: &mut Factorization,
    current: &mut Objective,
    cand: Result<Factorization>,
    x: &DenseMatrix,
    y: &[f64],
    lambda: f64,
    iteration: usize,
    step: Step,
    report: &mut FitReport,
    observer: &mut dyn FnMut(&StepEvent<'_>),
) -> Result<()> {
    let before = *current;
    let cand = match cand {
        Ok(c) => c,
        Err(Error::Convergence { .. }) => {
            report.failed_steps += 1;
            observer(&StepEvent {
                iteration,
                step,
                before,
                after: None,
                accepted: false,
                candidate: None,
            });
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let after = objective(&cand, x, y, lambda)?;
    // Normalization leaves F unchanged up to rounding; it is accepted unless
    // it moves F by more than that.
    let slack = match step {
        Step::Normalize => 1e-12 * (1.0 + before.f),
        _ => 0.0,
    };
    let accepted = after.f.is_finite() && after.f <= before.f + slack;
    observer(&StepEvent {
        iteration,
        step,
        before,
        after: Some(after),
        accepted,
        candidate: Some(&cand),
    });
    if accepted {
        *fac = cand;
        *current = after;
    } else {
        report.rejected_steps += 1;
    }
    Ok(())
}

/// Picks the run with the lowest final objective; ties go to the lower
/// restart index. Failed runs are skipped.
pub fn select_best<I>(runs: I) -> Result<(Factorization, FitReport)>
where
    I: IntoIterator<Item = Result<(Factorization, FitReport)>>,
{
    let mut best: Option<(Factorization, FitReport)> = None;
    let mut last_err = None;
    for run in runs {
        match run {
            Ok((fac, rep)) if rep.final_objective.is_finite() => {
                let better = match &best {
                    None => true,
                    Some((_, b)) => {
                        rep.final_objective < b.final_objective
                            || (rep.final_objective == b.final_objective
                                && rep.restart_index < b.restart_index)
                    }
                };
                if better {
                    best = Some((fac, rep));
                }
            }
            Ok(_) => {}
            Err(e @ (Error::InvalidArgument(_) | Error::Shape(_))) => return Err(e),
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| {
        Error::Numeric(match last_err {
            Some(e) => alloc::format!("every restart failed; last error: {e}"),
            None => "every restart failed".into(),
        })
    })
}

/// Runs `cfg.restarts` independent restarts and keeps the best.
pub fn fit(x: &DenseMatrix, y: &[f64], cfg: &FitConfig) -> Result<(Factorization, FitReport)> {
    cfg.validate()?;
    check_data(x, y)?;
    select_best((0..cfg.restarts).map(|k| fit_restart(x, y, cfg, k)))
}
