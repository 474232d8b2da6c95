#![allow(dead_code)]

pub mod shapes;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_cssnmf"))
}

/// Runs the binary with `args`, returning the raw output.
pub fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs the binary and panics with its stderr unless it exits with 0.
pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "cssnmf {args:?} failed ({:?}):\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const TOPIC_WORDS: [&str; 4] = ["lecture", "exam", "campus", "grade"];

/// A rated corpus with four planted themes. Documents mostly use the words
/// of one theme, and the rating grows with the theme index, so a fitted
/// model has something to find.
pub fn planted_corpus(n_docs: usize, seed: u64) -> Vec<(String, String, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_docs)
        .map(|i| {
            let topic = i % 4;
            let mut words = Vec::new();
            for _ in 0..10 {
                let t = if rng.random_bool(0.85) {
                    topic
                } else {
                    rng.random_range(0..4)
                };
                words.push(format!("{}{}", TOPIC_WORDS[t], rng.random_range(0..15)));
            }
            words.push("the and of".into());
            let rating = (1.0 + topic as f64 + rng.random_range(0.0..1.0)).min(5.0);
            (format!("doc{i}"), words.join(" "), rating)
        })
        .collect()
}

pub fn write_corpus_csv(path: &Path, docs: &[(String, String, f64)]) {
    let mut w = csv::Writer::from_path(path).unwrap();
    w.write_record(["id", "text", "rating"]).unwrap();
    for (id, text, rating) in docs {
        w.write_record([id.as_str(), text.as_str(), &rating.to_string()])
            .unwrap();
    }
    w.flush().unwrap();
}

pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

pub fn sha256(path: &Path) -> Vec<u8> {
    use sha2::{Digest, Sha256};
    Sha256::digest(std::fs::read(path).unwrap()).to_vec()
}
