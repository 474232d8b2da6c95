//! Topic listings and prediction summaries.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermWeight {
    pub term: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicEntry {
    /// 1-based topic number, i.e. row of `H`.
    pub topic: usize,
    /// Regression weight `θ_{topic+1}`.
    pub theta: f64,
    pub terms: Vec<TermWeight>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicReport {
    pub intercept: f64,
    pub top_k: usize,
    /// Sorted by `theta`, largest first.
    pub topics: Vec<TopicEntry>,
}

/// Builds the per-topic listing. Terms are ranked by weight, ties broken by
/// term (lexicographically); topics by `θ` descending, ties by topic number.
/// `top_k` is clamped to the vocabulary size.
pub fn topic_report<R: AsRef<[f64]>>(
    h_rows: &[R],
    theta: &[f64],
    vocab: &[String],
    top_k: usize,
) -> TopicReport {
    let k = top_k.min(vocab.len());
    let mut topics: Vec<TopicEntry> = h_rows
        .iter()
        .enumerate()
        .map(|(t, row)| {
            let mut idx: Vec<usize> = (0..vocab.len()).collect();
            let row = row.as_ref();
            idx.sort_by(|&a, &b| {
                row[b]
                    .total_cmp(&row[a])
                    .then_with(|| vocab[a].cmp(&vocab[b]))
            });
            TopicEntry {
                topic: t + 1,
                theta: theta[t + 1],
                terms: idx[..k]
                    .iter()
                    .map(|&j| TermWeight {
                        term: vocab[j].clone(),
                        weight: row[j],
                    })
                    .collect(),
            }
        })
        .collect();
    topics.sort_by(|a, b| b.theta.total_cmp(&a.theta).then(a.topic.cmp(&b.topic)));
    TopicReport {
        intercept: theta[0],
        top_k: k,
        topics,
    }
}

impl TopicReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "intercept theta_1 = {:.6}", self.intercept);
        for t in &self.topics {
            let _ = writeln!(out);
            let _ = writeln!(out, "Topic {} (theta = {:.6})", t.topic, t.theta);
            for tw in &t.terms {
                let _ = writeln!(out, "  {:<24} {:.6}", tw.term, tw.weight);
            }
        }
        out
    }
}

/// Mean true and predicted response for documents whose true rating falls in
/// a closed interval `[lo, hi]`; boundary ratings count in both neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSummary {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_true: f64,
    pub mean_predicted: f64,
}

pub fn grouped_summary(edges: &[f64], y_true: &[f64], y_hat: &[f64]) -> Vec<IntervalSummary> {
    edges
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let (mut n, mut st, mut sp) = (0usize, 0.0, 0.0);
            for (&t, &p) in y_true.iter().zip(y_hat) {
                if t >= lo && t <= hi {
                    n += 1;
                    st += t;
                    sp += p;
                }
            }
            let mean = |s: f64| if n > 0 { s / n as f64 } else { f64::NAN };
            IntervalSummary {
                lo,
                hi,
                count: n,
                mean_true: mean(st),
                mean_predicted: mean(sp),
            }
        })
        .collect()
}

/// Histogram of predictions per closed true-rating interval.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBin {
    pub interval_lo: f64,
    pub interval_hi: f64,
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub count: usize,
}

/// Bins start at `floor(min ŷ / width)·width` and cover every prediction.
pub fn prediction_histogram(
    edges: &[f64],
    y_true: &[f64],
    y_hat: &[f64],
    width: f64,
) -> Vec<HistogramBin> {
    let finite = y_hat.iter().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !(lo.is_finite() && width > 0.0) {
        return Vec::new();
    }
    let start = (lo / width).floor() * width;
    let nbins = (((hi - start) / width).floor() as usize) + 1;
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let mut counts = vec![0usize; nbins];
        for (&t, &p) in y_true.iter().zip(y_hat) {
            if t >= w[0] && t <= w[1] && p.is_finite() {
                let b = (((p - start) / width).floor() as usize).min(nbins - 1);
                counts[b] += 1;
            }
        }
        for (b, c) in counts.into_iter().enumerate() {
            out.push(HistogramBin {
                interval_lo: w[0],
                interval_hi: w[1],
                bin_lo: start + b as f64 * width,
                bin_hi: start + (b + 1) as f64 * width,
                count: c,
            });
        }
    }
    out
}
