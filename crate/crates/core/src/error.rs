use alloc::string::String;
use alloc::vec::Vec;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The active-set solver hit its iteration cap. `best` is the last feasible iterate.
    #[error("nnls did not converge after {iterations} iterations{}", location(.index))]
    Convergence {
        iterations: usize,
        best: Vec<f64>,
        index: Option<usize>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot balance corpus: interval [{lo}, {hi}{close} is empty", close = if *.closed { "]" } else { ")" })]
    EmptyInterval { lo: f64, hi: f64, closed: bool },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

fn location(index: &Option<usize>) -> String {
    match index {
        Some(i) => alloc::format!(" (at index {i})"),
        None => String::new(),
    }
}

impl Error {
    /// Attach a row/column index to a convergence error.
    pub(crate) fn at_index(self, i: usize) -> Self {
        match self {
            Error::Convergence {
                iterations, best, ..
            } => Error::Convergence {
                iterations,
                best,
                index: Some(i),
            },
            other => other,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
