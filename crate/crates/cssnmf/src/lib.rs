//! Command-line tooling around `cssnmf-core`: CSV/JSON formats, the model
//! file, parallel restarts and sweeps, reports.

pub mod cli;
pub mod error;
pub mod io;
pub mod model_file;
pub mod parallel;
pub mod report;
pub mod sweep;

pub use error::{CliError, Result};
