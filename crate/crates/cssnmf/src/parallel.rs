use cssnmf_core::model::{fit_restart, select_best, FitConfig, FitReport};
use cssnmf_core::{DenseMatrix, Factorization};
use rayon::prelude::*;

use crate::error::Result;

/// Same result as [`cssnmf_core::fit`], with restarts spread over the rayon
/// pool. Selection happens after collection, so the outcome does not depend
/// on scheduling.
pub fn fit_parallel(
    x: &DenseMatrix,
    y: &[f64],
    cfg: &FitConfig,
) -> Result<(Factorization, FitReport)> {
    cfg.validate()?;
    let runs: Vec<_> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| fit_restart(x, y, cfg, k))
        .collect();
    Ok(select_best(runs)?)
}
