//! The coupled factorization/regression model.

mod factorization;
mod fit;
mod predict;
mod update;

pub use factorization::{
    normalize, objective, regression_error, Factorization, Objective, H_FLOOR,
};
pub use fit::{
    fit, fit_restart, fit_restart_observed, initialize, select_best, FitConfig, FitReport, Step,
    StepEvent, TracePoint,
};
pub use predict::{predict, Prediction, Predictor};
pub use update::{update_h, update_theta, update_w};
