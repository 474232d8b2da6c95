use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RatedEntry {
    pub id: String,
    pub text: String,
    pub rating: f64,
}

/// Text entries paired with a real-valued rating inside a closed range.
#[derive(Debug, Clone, PartialEq)]
pub struct RatedCorpus {
    entries: Vec<RatedEntry>,
    range: (f64, f64),
}

pub const DEFAULT_RATING_RANGE: (f64, f64) = (1.0, 5.0);

impl RatedCorpus {
    pub fn new(entries: Vec<RatedEntry>) -> Result<Self> {
        Self::with_range(entries, DEFAULT_RATING_RANGE)
    }

    pub fn with_range(entries: Vec<RatedEntry>, range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = range;
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidArgument(alloc::format!(
                "rating range [{lo}, {hi}] is empty"
            )));
        }
        if let Some(e) = entries.iter().find(|e| !(e.rating >= lo && e.rating <= hi)) {
            return Err(Error::InvalidArgument(alloc::format!(
                "entry {:?} has rating {} outside [{lo}, {hi}]",
                e.id,
                e.rating
            )));
        }
        Ok(Self { entries, range })
    }

    pub fn entries(&self) -> &[RatedEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<RatedEntry> {
        self.entries
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ratings(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.rating).collect()
    }
}

/// Index of the half-open interval `[e_k, e_{k+1})` holding `v`; the last
/// interval is closed on the right.
pub fn interval_index(edges: &[f64], v: f64) -> Option<usize> {
    let k = edges.len().checked_sub(1)?;
    if k == 0 {
        return None;
    }
    if v == edges[k] {
        return Some(k - 1);
    }
    (0..k).find(|&i| edges[i] <= v && v < edges[i + 1])
}

/// Counts per interval of `edges`.
pub fn interval_counts(corpus: &RatedCorpus, edges: &[f64]) -> Vec<usize> {
    let mut counts = alloc::vec![0; edges.len().saturating_sub(1)];
    for e in corpus.entries() {
        if let Some(k) = interval_index(edges, e.rating) {
            counts[k] += 1;
        }
    }
    counts
}

/// Subsamples every rating interval down to the size of the smallest one.
///
/// Selection within an interval is uniform without replacement; the output
/// keeps the corpus order. Ratings outside `[edges[0], edges[last]]` are
/// dropped.
pub fn balance(corpus: &RatedCorpus, edges: &[f64], seed: u64) -> Result<RatedCorpus> {
    if edges.len() < 2
        || edges
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(core::cmp::Ordering::Less))
    {
        return Err(Error::InvalidArgument(
            "interval edges must be strictly ascending with at least two values".into(),
        ));
    }
    let k = edges.len() - 1;
    let mut buckets: Vec<Vec<usize>> = alloc::vec![Vec::new(); k];
    for (i, e) in corpus.entries().iter().enumerate() {
        if let Some(b) = interval_index(edges, e.rating) {
            buckets[b].push(i);
        }
    }
    if let Some(b) = buckets.iter().position(Vec::is_empty) {
        return Err(Error::EmptyInterval {
            lo: edges[b],
            hi: edges[b + 1],
            closed: b + 1 == k,
        });
    }
    let target = buckets.iter().map(Vec::len).min().unwrap_or(0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep: Vec<usize> = Vec::with_capacity(target * k);
    for bucket in &buckets {
        if bucket.len() == target {
            keep.extend_from_slice(bucket);
        } else {
            let picked = rand::seq::index::sample(&mut rng, bucket.len(), target);
            keep.extend(picked.iter().map(|p| bucket[p]));
        }
    }
    keep.sort_unstable();
    let entries = keep
        .into_iter()
        .map(|i| corpus.entries[i].clone())
        .collect();
    Ok(RatedCorpus {
        entries,
        range: corpus.range,
    })
}
