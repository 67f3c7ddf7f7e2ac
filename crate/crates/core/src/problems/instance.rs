//! On-disk Lasso instances.
//!
//! An instance directory holds
//!
//! | file           | contents                                                   |
//! |----------------|------------------------------------------------------------|
//! | `manifest.json`| `{"n", "m", "lambda", "seed", "format_version", "planted"}`|
//! | `matrix.csv`   | header `row,col,value`, one nonzero per line, 0-based      |
//! | `rhs.csv`      | header `b`, `m` lines                                      |
//! | `solution.csv` | header `x`, `n` lines; present only when `planted` is true |
//!
//! Floats are written in shortest round-trip form, so loading a saved
//! instance reproduces it bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

use super::LassoInstance;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceManifest {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub seed: Option<u64>,
    pub format_version: u32,
    pub planted: bool,
}

fn csv_error(file: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse { line, column: 0, message: format!("{file}: {e}") }
}

fn write_column(path: &Path, header: &str, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(header, e))?;
    w.write_record([header]).map_err(|e| csv_error(header, e))?;
    for v in values {
        w.write_record([v.to_string()]).map_err(|e| csv_error(header, e))?;
    }
    w.flush()?;
    Ok(())
}

fn read_column(path: &Path, expected: usize) -> Result<Vec<f64>> {
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("column").to_string();
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(&name, e))?;
    let mut out = Vec::with_capacity(expected);
    for rec in r.deserialize::<(f64,)>() {
        out.push(rec.map_err(|e| csv_error(&name, e))?.0);
    }
    if out.len() != expected {
        return Err(Error::InvalidDataset(format!("{name}: expected {expected} values, found {}", out.len())));
    }
    Ok(out)
}

pub fn save_lasso_instance(inst: &LassoInstance, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let manifest = InstanceManifest {
        n: inst.n(),
        m: inst.m(),
        lambda: inst.lambda,
        seed: inst.seed,
        format_version: FORMAT_VERSION,
        planted: inst.planted_solution.is_some(),
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;

    let mut w = csv::Writer::from_path(dir.join("matrix.csv")).map_err(|e| csv_error("matrix.csv", e))?;
    w.write_record(["row", "col", "value"]).map_err(|e| csv_error("matrix.csv", e))?;
    for r in 0..inst.m() {
        let (cols, vals) = inst.matrix.row(r);
        for (c, v) in cols.iter().zip(vals) {
            w.write_record([r.to_string(), c.to_string(), v.to_string()]).map_err(|e| csv_error("matrix.csv", e))?;
        }
    }
    w.flush()?;

    write_column(&dir.join("rhs.csv"), "b", &inst.rhs)?;
    if let Some(x) = &inst.planted_solution {
        write_column(&dir.join("solution.csv"), "x", x)?;
    }
    Ok(())
}

pub fn load_lasso_instance(dir: &Path) -> Result<LassoInstance> {
    let manifest: InstanceManifest = serde_json::from_slice(&fs::read(dir.join("manifest.json"))?)?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::InvalidDataset(format!(
            "unsupported instance format version {} (expected {FORMAT_VERSION})",
            manifest.format_version
        )));
    }
    if !(manifest.lambda > 0.0) {
        return Err(Error::InvalidDataset(format!("lambda must be positive, got {}", manifest.lambda)));
    }
    let mut r = csv::Reader::from_path(dir.join("matrix.csv")).map_err(|e| csv_error("matrix.csv", e))?;
    let mut triplets = Vec::new();
    for rec in r.deserialize::<(usize, usize, f64)>() {
        triplets.push(rec.map_err(|e| csv_error("matrix.csv", e))?);
    }
    let matrix = SparseMatrix::from_triplets(manifest.m, manifest.n, &triplets)?;
    let rhs = read_column(&dir.join("rhs.csv"), manifest.m)?;
    let planted_solution =
        if manifest.planted { Some(read_column(&dir.join("solution.csv"), manifest.n)?) } else { None };
    Ok(LassoInstance { matrix, rhs, lambda: manifest.lambda, planted_solution, seed: manifest.seed })
}
