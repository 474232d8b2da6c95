//! The persisted model: one JSON document holding `θ`, `H`, the fit
//! configuration and trace, and optionally the vocabulary with its idf table.
//! `W` is document-specific and is not stored.

use std::path::Path;

use cssnmf_core::model::{FitConfig, FitReport, TracePoint};
use cssnmf_core::text::{DocumentTermMatrix, TfidfConfig, Vocabulary};
use cssnmf_core::{DenseMatrix, Factorization};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io;

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub r: usize,
    pub lambda: f64,
    pub theta: Vec<f64>,
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idf: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tfidf: Option<TfidfConfig>,
    pub config: FitConfig,
    pub objective_trace: Vec<TracePoint>,
    pub final_objective: f64,
    pub restart_index: usize,
}

/// Vocabulary and idf table written by `ingest`, attached to a model by `fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabFile {
    pub terms: Vec<String>,
    pub idf: Vec<f64>,
    pub tfidf: TfidfConfig,
    pub stopwords_version: String,
}

impl VocabFile {
    pub fn from_dtm(dtm: &DocumentTermMatrix) -> Self {
        Self {
            terms: dtm.vocab.terms().to_vec(),
            idf: dtm.idf.clone(),
            tfidf: dtm.config.clone(),
            stopwords_version: cssnmf_core::text::ENGLISH_STOPWORDS_VERSION.to_string(),
        }
    }
}

impl ModelFile {
    pub fn new(
        fac: &Factorization,
        cfg: &FitConfig,
        report: &FitReport,
        vocab: Option<&VocabFile>,
    ) -> Self {
        Self {
            version: MODEL_VERSION,
            r: fac.rank(),
            lambda: cfg.lambda,
            theta: fac.theta.clone(),
            h: fac.h.row_iter().map(<[f64]>::to_vec).collect(),
            vocabulary: vocab.map(|v| v.terms.clone()),
            idf: vocab.map(|v| v.idf.clone()),
            tfidf: vocab.map(|v| v.tfidf.clone()),
            config: cfg.clone(),
            objective_trace: report.objective_trace.clone(),
            final_objective: report.final_objective,
            restart_index: report.restart_index,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let model: ModelFile = io::read_json(path)?;
        model.validate().map_err(|msg| CliError::parse(path, msg))?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_json(path, self)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.version != MODEL_VERSION {
            return Err(format!("unsupported model version {}", self.version));
        }
        if self.h.len() != self.r || self.theta.len() != self.r + 1 {
            return Err(format!(
                "r = {} but H has {} rows and theta has {} entries",
                self.r,
                self.h.len(),
                self.theta.len()
            ));
        }
        let m = self.h.first().map_or(0, Vec::len);
        if let Some(v) = &self.vocabulary {
            if v.len() != m {
                return Err(format!(
                    "vocabulary has {} terms, H has {m} columns",
                    v.len()
                ));
            }
            if v.windows(2).any(|w| w[0] >= w[1]) {
                return Err("vocabulary must be sorted and free of duplicates".into());
            }
            if self.idf.as_ref().is_some_and(|idf| idf.len() != m) {
                return Err("idf length does not match vocabulary".into());
            }
        }
        Ok(())
    }

    pub fn h_matrix(&self) -> Result<DenseMatrix> {
        Ok(DenseMatrix::from_rows(&self.h)?)
    }

    pub fn vocabulary(&self) -> Option<Vocabulary> {
        self.vocabulary.clone().map(Vocabulary::new)
    }
}
