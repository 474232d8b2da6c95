//! Rated text corpora to TF-IDF document-term matrices.

mod corpus;
mod tfidf;
mod tokenize;

pub use corpus::{
    balance, interval_counts, interval_index, RatedCorpus, RatedEntry, DEFAULT_RATING_RANGE,
};
pub use tfidf::{
    build_tfidf, smoothed_idf, vectorize_new, DocumentTermMatrix, Norm, TfidfConfig, Vocabulary,
};
pub use tokenize::{tokenize, StopWords, Tokenizer, ENGLISH_STOPWORDS_VERSION};
