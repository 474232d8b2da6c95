//! Checks report files against the layouts in `tests/golden`.
//!
//! Goldens fix structure only (headers, key sets, interval rows, line shapes);
//! the numbers depend on the data and are checked for consistency instead.

use std::path::{Path, PathBuf};

use super::read_csv;

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn num(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("not a number: {s:?}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Checks predictions.csv, summary.csv and histogram.csv in `dir` for a
/// rank-`r` model scored against true ratings.
pub fn check_prediction_reports(dir: &Path, r: usize) -> Result<(), String> {
    let g = golden("predictions.csv");
    let mut want: Vec<String> = g.trim().split(',').map(str::to_string).collect();
    want.pop();
    want.extend((1..=r).map(|k| format!("w_{k}")));
    let (header, preds) = read_csv(&dir.join("predictions.csv"));
    ensure(header == want, || {
        format!("predictions header {header:?}, expected {want:?}")
    })?;
    ensure(!preds.is_empty(), || "no predictions".into())?;
    for row in &preds {
        ensure(row.len() == want.len(), || {
            format!("ragged prediction row {row:?}")
        })?;
        for cell in &row[1..] {
            num(cell)?;
        }
        for w in &row[3..] {
            ensure(num(w)? >= 0.0, || {
                format!("negative topic weight in {row:?}")
            })?;
        }
    }

    let g = golden("summary.csv");
    let mut lines = g.lines();
    let want: Vec<&str> = lines.next().unwrap().split(',').collect();
    let keys: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (num(a).unwrap(), num(b).unwrap())
        })
        .collect();
    let (header, summary) = read_csv(&dir.join("summary.csv"));
    ensure(header == want, || {
        format!("summary header {header:?}, expected {want:?}")
    })?;
    ensure(summary.len() == keys.len(), || {
        format!("{} summary rows, expected {}", summary.len(), keys.len())
    })?;
    let y_true: Vec<f64> = preds.iter().map(|r| num(&r[1]).unwrap()).collect();
    let y_hat: Vec<f64> = preds.iter().map(|r| num(&r[2]).unwrap()).collect();
    let mut counts = Vec::new();
    for (row, &(lo, hi)) in summary.iter().zip(&keys) {
        ensure((num(&row[0])?, num(&row[1])?) == (lo, hi), || {
            format!("summary row {row:?}, expected [{lo}, {hi}]")
        })?;
        // recompute the grouped means from predictions.csv; closed intervals
        let inside: Vec<usize> = (0..y_true.len())
            .filter(|&i| y_true[i] >= lo && y_true[i] <= hi)
            .collect();
        let count: usize = row[2]
            .parse()
            .map_err(|_| format!("bad count {:?}", row[2]))?;
        ensure(count == inside.len(), || {
            format!(
                "interval [{lo}, {hi}] count {count}, expected {}",
                inside.len()
            )
        })?;
        if count > 0 {
            let mt = inside.iter().map(|&i| y_true[i]).sum::<f64>() / count as f64;
            let mp = inside.iter().map(|&i| y_hat[i]).sum::<f64>() / count as f64;
            ensure(
                (num(&row[3])? - mt).abs() <= 1e-9 * (1.0 + mt.abs()),
                || format!("mean_true of {row:?}"),
            )?;
            ensure(
                (num(&row[4])? - mp).abs() <= 1e-9 * (1.0 + mp.abs()),
                || format!("mean_predicted of {row:?}"),
            )?;
        }
        counts.push(count);
    }

    let want: Vec<String> = golden("histogram.csv")
        .trim()
        .split(',')
        .map(str::to_string)
        .collect();
    let (header, hist) = read_csv(&dir.join("histogram.csv"));
    ensure(header == want, || {
        format!("histogram header {header:?}, expected {want:?}")
    })?;
    for (&(lo, hi), &count) in keys.iter().zip(&counts) {
        let bins: Vec<&Vec<String>> = hist
            .iter()
            .filter(|r| num(&r[0]).unwrap() == lo && num(&r[1]).unwrap() == hi)
            .collect();
        ensure(!bins.is_empty(), || {
            format!("no histogram bins for [{lo}, {hi}]")
        })?;
        let total: usize = bins.iter().map(|r| r[4].parse::<usize>().unwrap()).sum();
        ensure(total == count, || {
            format!("histogram of [{lo}, {hi}] holds {total}, expected {count}")
        })?;
        for pair in bins.windows(2) {
            ensure(num(&pair[0][3])? == num(&pair[1][2])?, || {
                "histogram bins are not contiguous".into()
            })?;
        }
    }
    Ok(())
}

/// Checks topics.json and topics.txt in `dir`: `r` topics sorted by θ,
/// `top_k` terms each sorted by weight.
pub fn check_topic_reports(dir: &Path, r: usize, top_k: usize) -> Result<(), String> {
    let g: serde_json::Value = serde_json::from_str(&golden("topics.json")).unwrap();
    let keys =
        |v: &serde_json::Value| -> Vec<String> { v.as_object().unwrap().keys().cloned().collect() };
    let want = |k: &str| -> Vec<String> {
        g[k].as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_str().unwrap().to_string())
            .collect()
    };
    let text = std::fs::read_to_string(dir.join("topics.json")).map_err(|e| e.to_string())?;
    // preserve_order is off, so compare key sets through sorted lists
    let report: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let sorted = |mut v: Vec<String>| {
        v.sort();
        v
    };
    ensure(sorted(keys(&report)) == sorted(want("report")), || {
        format!("report keys {:?}", keys(&report))
    })?;
    ensure(report["top_k"] == top_k, || {
        format!("top_k {}", report["top_k"])
    })?;
    let topics = report["topics"]
        .as_array()
        .ok_or("topics is not an array")?;
    ensure(topics.len() == r, || {
        format!("{} topics, expected {r}", topics.len())
    })?;
    let mut thetas = Vec::new();
    let mut numbers = Vec::new();
    for t in topics {
        ensure(sorted(keys(t)) == sorted(want("topic")), || {
            format!("topic keys {:?}", keys(t))
        })?;
        thetas.push(t["theta"].as_f64().ok_or("theta is not a number")?);
        numbers.push(t["topic"].as_u64().ok_or("topic is not a count")?);
        let terms = t["terms"].as_array().ok_or("terms is not an array")?;
        ensure(terms.len() == top_k, || {
            format!("{} terms, expected {top_k}", terms.len())
        })?;
        let mut prev = f64::INFINITY;
        for tw in terms {
            ensure(sorted(keys(tw)) == sorted(want("term")), || {
                format!("term keys {:?}", keys(tw))
            })?;
            let w = tw["weight"].as_f64().ok_or("weight is not a number")?;
            ensure(w <= prev && w >= 0.0, || {
                "term weights are not sorted descending".into()
            })?;
            prev = w;
        }
    }
    ensure(thetas.windows(2).all(|w| w[0] >= w[1]), || {
        format!("topics not sorted by theta: {thetas:?}")
    })?;
    numbers.sort_unstable();
    ensure(numbers == (1..=r as u64).collect::<Vec<_>>(), || {
        format!("topic numbers {numbers:?}")
    })?;

    let pattern = golden("topics.txt");
    let pat: Vec<&str> = pattern.lines().collect();
    let txt = std::fs::read_to_string(dir.join("topics.txt")).map_err(|e| e.to_string())?;
    let lines: Vec<&str> = txt.lines().collect();
    let prefix = |p: &str| p.split('<').next().unwrap().to_string();
    ensure(lines.len() == 1 + r * (2 + top_k), || {
        format!("topics.txt has {} lines", lines.len())
    })?;
    ensure(lines[0].starts_with(&prefix(pat[0])), || {
        format!("first line {:?}", lines[0])
    })?;
    num(lines[0].rsplit(' ').next().unwrap())?;
    for (b, block) in lines[1..].chunks(2 + top_k).enumerate() {
        ensure(block[0].is_empty(), || {
            "missing blank line between topics".into()
        })?;
        ensure(block[1].starts_with(&prefix(pat[2])), || {
            format!("topic line {:?}", block[1])
        })?;
        let th = block[1].rsplit("= ").next().unwrap().trim_end_matches(')');
        ensure(
            (num(th)? - thetas[b]).abs() <= 1e-6 * (1.0 + thetas[b].abs()),
            || "text theta differs from JSON".into(),
        )?;
        for l in &block[2..] {
            let parts: Vec<&str> = l.split_whitespace().collect();
            ensure(l.starts_with(&prefix(pat[3])) && parts.len() == 2, || {
                format!("term line {l:?}")
            })?;
            num(parts[1])?;
        }
    }
    Ok(())
}
