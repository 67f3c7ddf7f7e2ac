//! LIBSVM sparse text format.
//!
//! Each non-blank line is `<label> <index>:<value> …` with 1-based,
//! strictly increasing indices, separated by ASCII whitespace. Everything
//! after `#` is a comment.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Largest accepted feature index.
pub const MAX_FEATURE_INDEX: usize = u32::MAX as usize;

/// Samples as rows of a sparse matrix, with one label per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub features: SparseMatrix,
    pub labels: Vec<f64>,
}

impl LabeledDataset {
    pub fn new(features: SparseMatrix, labels: Vec<f64>) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} samples but {} labels",
                features.rows(),
                labels.len()
            )));
        }
        Ok(Self { features, labels })
    }

    pub fn sample_count(&self) -> usize {
        self.labels.len()
    }

    pub fn feature_count(&self) -> usize {
        self.features.cols()
    }

    /// Whether every label is `±1`.
    pub fn is_binary(&self) -> bool {
        self.labels.iter().all(|&y| y == 1.0 || y == -1.0)
    }
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Parses a dataset; the feature count is the largest index seen.
pub fn parse_libsvm(bytes: &[u8]) -> Result<LabeledDataset> {
    parse_libsvm_with(bytes, None)
}

/// Parses a dataset, optionally forcing the feature count (it must cover
/// every index in the file).
pub fn parse_libsvm_with(bytes: &[u8], feature_count: Option<usize>) -> Result<LabeledDataset> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let before = &bytes[..e.valid_up_to()];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        parse_error(line, e.valid_up_to() - line_start + 1, "invalid UTF-8")
    })?;

    let mut offsets = vec![0usize];
    let mut indices = Vec::new();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize;

    for (line_no, raw) in text.split('\n').enumerate() {
        let line_no = line_no + 1;
        let content = raw.split('#').next().unwrap_or_default();
        let mut tokens = tokens_with_columns(content);
        let Some((col, label_tok)) = tokens.next() else { continue };
        let label: f64 = label_tok
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| parse_error(line_no, col, format!("invalid label '{label_tok}'")))?;
        let mut last = 0usize;
        for (col, tok) in tokens {
            let bad = || parse_error(line_no, col, format!("malformed feature '{tok}'"));
            let (idx, val) = tok.split_once(':').ok_or_else(bad)?;
            let idx: usize = idx.parse().map_err(|_| bad())?;
            let val: f64 = val.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(bad)?;
            if idx == 0 {
                return Err(parse_error(line_no, col, format!("feature index must be at least 1 in '{tok}'")));
            }
            if idx > MAX_FEATURE_INDEX {
                return Err(parse_error(line_no, col, format!("feature index too large in '{tok}'")));
            }
            if idx <= last {
                return Err(parse_error(line_no, col, format!("indices must be strictly increasing at '{tok}'")));
            }
            last = idx;
            indices.push(idx - 1);
            values.push(val);
        }
        max_index = max_index.max(last);
        labels.push(label);
        offsets.push(indices.len());
    }

    if labels.is_empty() {
        return Err(Error::InvalidDataset("empty dataset".into()));
    }
    let cols = match feature_count {
        Some(n) if n < max_index => {
            return Err(Error::InvalidDataset(format!(
                "feature count {n} is smaller than the largest index {max_index}"
            )))
        }
        Some(n) => n,
        None => max_index,
    };
    let features = SparseMatrix::new(labels.len(), cols, offsets, indices, values)?;
    LabeledDataset::new(features, labels)
}

/// Whitespace-separated tokens with their 1-based byte columns.
fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let trimmed = rest.trim_start_matches(|c: char| c.is_ascii_whitespace());
        offset += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            return None;
        }
        let end = trimmed.find(|c: char| c.is_ascii_whitespace()).unwrap_or(trimmed.len());
        let tok = &trimmed[..end];
        let col = offset + 1;
        offset += end;
        rest = &trimmed[end..];
        Some((col, tok))
    })
}

/// Serializes in LIBSVM format. Values use the shortest representation
/// that parses back to the same `f64`, so `parse(write(d)) == d` whenever
/// the feature count equals the largest stored index.
pub fn write_libsvm(ds: &LabeledDataset) -> String {
    let mut out = String::new();
    for (r, label) in ds.labels.iter().enumerate() {
        let _ = write!(out, "{label}");
        let (idx, vals) = ds.features.row(r);
        for (i, v) in idx.iter().zip(vals) {
            let _ = write!(out, " {}:{v}", i + 1);
        }
        out.push('\n');
    }
    out
}

pub fn read_libsvm(path: &std::path::Path) -> Result<LabeledDataset> {
    parse_libsvm(&std::fs::read(path)?)
}
