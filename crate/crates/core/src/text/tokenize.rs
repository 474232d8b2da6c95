use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::TfidfConfig;

const ENGLISH_STOPWORDS: &str = include_str!("english_stopwords.txt");

/// Identifier of the shipped English list; part of the persisted config.
pub const ENGLISH_STOPWORDS_VERSION: &str = "english-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum StopWords {
    None,
    /// The 318-word list in `english_stopwords.txt`.
    #[default]
    English,
}

impl StopWords {
    pub fn words(self) -> impl Iterator<Item = &'static str> {
        let list = match self {
            StopWords::None => "",
            StopWords::English => ENGLISH_STOPWORDS,
        };
        list.lines().map(str::trim).filter(|w| !w.is_empty())
    }
}

/// Splits text into terms: optional lowercasing, maximal alphanumeric runs,
/// at least two characters, stop words removed.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    lowercase: bool,
    stop: BTreeSet<&'static str>,
}

impl Tokenizer {
    pub fn new(cfg: &TfidfConfig) -> Self {
        Self {
            lowercase: cfg.lowercase,
            stop: cfg.stopwords.words().collect(),
        }
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let owned;
        let text = if self.lowercase {
            owned = text.to_lowercase();
            owned.as_str()
        } else {
            text
        };
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|t| t.chars().count() >= 2 && !self.stop.contains(t))
            .map(ToString::to_string)
            .collect()
    }
}

pub fn tokenize(text: &str, cfg: &TfidfConfig) -> Vec<String> {
    Tokenizer::new(cfg).tokenize(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn basic() {
        let cfg = TfidfConfig::default();
        assert_eq!(tokenize("Great teacher!", &cfg), vec!["great", "teacher"]);
    }

    #[test]
    fn stopwords_only() {
        assert!(tokenize("the and of", &TfidfConfig::default()).is_empty());
    }

    #[test]
    fn apostrophe_splits() {
        // "don't" -> "don" + "t"; the one-character piece is dropped
        assert_eq!(
            tokenize("don't stop", &TfidfConfig::default()),
            vec!["don", "stop"]
        );
    }

    #[test]
    fn case_and_stopword_switches() {
        let cfg = TfidfConfig {
            lowercase: false,
            stopwords: StopWords::None,
            ..TfidfConfig::default()
        };
        assert_eq!(
            tokenize("The Exam, the end", &cfg),
            vec!["The", "Exam", "the", "end"]
        );
    }

    #[test]
    fn english_list_size() {
        assert_eq!(StopWords::English.words().count(), 318);
        assert_eq!(StopWords::None.words().count(), 0);
    }
}
