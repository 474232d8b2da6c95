use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::corpus::RatedCorpus;
use super::tokenize::{StopWords, Tokenizer};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Norm {
    #[default]
    L1,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TfidfConfig {
    /// Minimum document frequency as a fraction of the corpus size.
    pub min_df: f64,
    /// Maximum document frequency as a fraction of the corpus size.
    pub max_df: f64,
    pub stopwords: StopWords,
    pub lowercase: bool,
    pub norm: Norm,
}

impl Default for TfidfConfig {
    fn default() -> Self {
        Self {
            min_df: 0.01,
            max_df: 0.15,
            stopwords: StopWords::English,
            lowercase: true,
            norm: Norm::L1,
        }
    }
}

impl TfidfConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !in_unit(self.min_df) || !in_unit(self.max_df) || self.min_df > self.max_df {
            return Err(Error::Config(alloc::format!(
                "need 0 <= min_df <= max_df <= 1, got min_df={} max_df={}",
                self.min_df,
                self.max_df
            )));
        }
        Ok(())
    }

    /// Inclusive document-count window `[ceil(min_df·n), floor(max_df·n)]`.
    pub fn df_bounds(&self, n_docs: usize) -> (usize, usize) {
        // absorb representation error such as 0.07·100 = 7.000000000000001
        let n = n_docs as f64;
        let lo = libm::ceil(self.min_df * n - 1e-9).max(0.0) as usize;
        let hi = libm::floor(self.max_df * n + 1e-9).max(0.0) as usize;
        (lo, hi)
    }
}

/// Sorted term list with its inverse index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Vocabulary {
    /// Sorts and deduplicates `terms`.
    pub fn new(terms: impl IntoIterator<Item = String>) -> Self {
        let mut terms: Vec<String> = terms.into_iter().collect();
        terms.sort();
        terms.dedup();
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, i: usize) -> &str {
        &self.terms[i]
    }
}

/// ℓ1-normalized TF-IDF matrix, one row per corpus entry.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentTermMatrix {
    pub x: DenseMatrix,
    pub vocab: Vocabulary,
    /// Smoothed idf weight per vocabulary term.
    pub idf: Vec<f64>,
    pub doc_ids: Vec<String>,
    /// Rows with no in-vocabulary term (left as zeros).
    pub empty_rows: Vec<usize>,
    pub config: TfidfConfig,
}

/// `ln((1 + n) / (1 + df)) + 1`
pub fn smoothed_idf(n_docs: usize, df: usize) -> f64 {
    libm::log((1.0 + n_docs as f64) / (1.0 + df as f64)) + 1.0
}

fn weigh_row(counts: &[(usize, f64)], idf: &[f64], out: &mut [f64]) -> bool {
    for &(j, c) in counts {
        out[j] += c * idf[j];
    }
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        out.iter_mut().for_each(|v| *v /= total);
        true
    } else {
        false
    }
}

/// Builds the vocabulary, idf weights and document-term matrix of `corpus`.
pub fn build_tfidf(corpus: &RatedCorpus, cfg: &TfidfConfig) -> Result<DocumentTermMatrix> {
    cfg.validate()?;
    let n = corpus.len();
    if n == 0 {
        return Err(Error::InvalidArgument("corpus is empty".into()));
    }
    let tokenizer = Tokenizer::new(cfg);

    let mut doc_counts: Vec<BTreeMap<String, usize>> = Vec::with_capacity(n);
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for entry in corpus.entries() {
        let mut counts = BTreeMap::new();
        for t in tokenizer.tokenize(&entry.text) {
            *counts.entry(t).or_insert(0) += 1;
        }
        for t in counts.keys() {
            *df.entry(t.clone()).or_insert(0) += 1;
        }
        doc_counts.push(counts);
    }

    let (lo, hi) = cfg.df_bounds(n);
    let kept: Vec<(String, usize)> = df
        .into_iter()
        .filter(|(_, d)| (lo..=hi).contains(d))
        .collect();
    if kept.is_empty() {
        return Err(Error::Config(alloc::format!(
            "no term has document frequency in [{lo}, {hi}] over {n} documents \
             (min_df={}, max_df={})",
            cfg.min_df,
            cfg.max_df
        )));
    }
    let idf: Vec<f64> = kept.iter().map(|(_, d)| smoothed_idf(n, *d)).collect();
    let vocab = Vocabulary::new(kept.into_iter().map(|(t, _)| t));

    let m = vocab.len();
    let mut x = DenseMatrix::zeros(n, m);
    let mut empty_rows = Vec::new();
    for (i, counts) in doc_counts.iter().enumerate() {
        let hits: Vec<(usize, f64)> = counts
            .iter()
            .filter_map(|(t, &c)| vocab.get(t).map(|j| (j, c as f64)))
            .collect();
        if !weigh_row(&hits, &idf, x.row_mut(i)) {
            empty_rows.push(i);
        }
    }

    Ok(DocumentTermMatrix {
        x,
        vocab,
        idf,
        doc_ids: corpus.entries().iter().map(|e| e.id.clone()).collect(),
        empty_rows,
        config: cfg.clone(),
    })
}

/// Encodes an unseen document with a trained vocabulary and idf table.
/// Out-of-vocabulary terms are ignored; a document with none left is zero.
pub fn vectorize_new(doc: &str, vocab: &Vocabulary, cfg: &TfidfConfig, idf: &[f64]) -> Vec<f64> {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for t in Tokenizer::new(cfg).tokenize(doc) {
        if let Some(j) = vocab.get(&t) {
            *counts.entry(j).or_insert(0.0) += 1.0;
        }
    }
    let hits: Vec<(usize, f64)> = counts.into_iter().collect();
    let mut out = alloc::vec![0.0; vocab.len()];
    weigh_row(&hits, idf, &mut out);
    out
}
