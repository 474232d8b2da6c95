//! CSV and JSON-lines readers/writers.
//!
//! Every CSV has a header row. Numbers are written with Rust's shortest
//! round-trip formatting, so identical values always give identical bytes.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use cssnmf_core::text::{RatedCorpus, RatedEntry};
use cssnmf_core::DenseMatrix;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, Result};

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::parse(path, format!("{other:?}")),
    }
}

/// Writes rows of string cells under `header`.
pub fn write_table<I, R>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>())
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads a numeric matrix, returning the header and the values.
pub fn read_matrix(path: &Path) -> Result<(Vec<String>, DenseMatrix)> {
    let mut rdr = csv_reader(path)?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let cols = header.len();
    let mut data = Vec::new();
    let mut rows = 0;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        if rec.len() != cols {
            return Err(CliError::parse(
                path,
                format!(
                    "row {} has {} fields, header has {cols}",
                    line + 1,
                    rec.len()
                ),
            ));
        }
        for (j, cell) in rec.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                CliError::parse(
                    path,
                    format!("row {}, column {}: not a number: {cell:?}", line + 1, j + 1),
                )
            })?;
            data.push(v);
        }
        rows += 1;
    }
    let m = DenseMatrix::new(rows, cols, data).map_err(|e| CliError::parse(path, e.to_string()))?;
    Ok((header, m))
}

pub fn write_matrix(path: &Path, header: &[String], m: &DenseMatrix) -> Result<()> {
    write_table(
        path,
        header,
        m.row_iter().map(|r| r.iter().map(|&v| fmt_f64(v))),
    )
}

/// Header `prefix1, prefix2, …`.
pub fn numbered_header(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Reads a response vector: the column named `y`, or the only column.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let (header, m) = read_matrix(path)?;
    let col = match header.iter().position(|h| h == "y") {
        Some(j) => j,
        None if header.len() == 1 => 0,
        None => {
            return Err(CliError::parse(
                path,
                "expected a single column or a column named \"y\"",
            ))
        }
    };
    Ok(m.col(col))
}

pub fn write_vector(path: &Path, name: &str, v: &[f64]) -> Result<()> {
    write_table(path, &[name.to_string()], v.iter().map(|&x| [fmt_f64(x)]))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| CliError::parse(path, e.to_string()))?;
    w.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| CliError::parse(path, e.to_string()))
}

fn is_jsonl(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl" | "ndjson" | "json")
    )
}

/// Reads `id,text,rating` records from CSV, or one JSON object per line
/// (`.jsonl`, `.ndjson`, `.json`).
pub fn read_entries(path: &Path) -> Result<Vec<RatedEntry>> {
    if is_jsonl(path) {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let mut out = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| CliError::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let e: RatedEntry = serde_json::from_str(&line)
                .map_err(|e| CliError::parse(path, format!("line {}: {e}", i + 1)))?;
            out.push(e);
        }
        Ok(out)
    } else {
        let mut rdr = csv_reader(path)?;
        rdr.deserialize()
            .map(|r| r.map_err(|e| csv_err(path, e)))
            .collect()
    }
}

pub fn read_corpus(path: &Path, range: (f64, f64)) -> Result<RatedCorpus> {
    Ok(RatedCorpus::with_range(read_entries(path)?, range)?)
}
