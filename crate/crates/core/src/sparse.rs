//! Compressed sparse row matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Row-compressed `rows × cols` matrix.
///
/// Column indices are strictly increasing within each row and
/// `offsets.len() == rows + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        offsets: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if offsets.len() != rows + 1 {
            return Err(Error::InvalidMatrix(format!(
                "offsets has length {}, expected {}",
                offsets.len(),
                rows + 1
            )));
        }
        if offsets[0] != 0 || offsets[rows] != indices.len() || indices.len() != values.len() {
            return Err(Error::InvalidMatrix(
                "offsets inconsistent with index/value storage".into(),
            ));
        }
        for r in 0..rows {
            let (lo, hi) = (offsets[r], offsets[r + 1]);
            if lo > hi {
                return Err(Error::InvalidMatrix(format!("row {r} has decreasing offsets")));
            }
            let row = &indices[lo..hi];
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidMatrix(format!(
                    "column indices not strictly increasing in row {r}"
                )));
            }
            if let Some(&last) = row.last() {
                if last >= cols {
                    return Err(Error::InvalidMatrix(format!(
                        "column index {last} out of range in row {r}"
                    )));
                }
            }
        }
        Ok(Self { rows, cols, offsets, indices, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, offsets: vec![0; rows + 1], indices: vec![], values: vec![] }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            offsets: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds from a row-major dense array, dropping exact zeros.
    pub fn from_dense(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        let mut offsets = Vec::with_capacity(rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for r in 0..rows {
            for c in 0..cols {
                let v = data[r * cols + c];
                if v != 0.0 {
                    indices.push(c);
                    values.push(v);
                }
            }
            offsets.push(indices.len());
        }
        Ok(Self { rows, cols, offsets, indices, values })
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted = triplets.to_vec();
        for &(r, c, _) in &sorted {
            if r >= rows || c >= cols {
                return Err(Error::InvalidMatrix(format!("triplet ({r}, {c}) out of range")));
            }
        }
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut offsets = vec![0; rows + 1];
        let mut indices: Vec<usize> = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            indices.push(c);
            values.push(v);
            offsets[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..rows {
            offsets[r + 1] += offsets[r];
        }
        Ok(Self { rows, cols, offsets, indices, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.offsets[r], self.offsets[r + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    pub fn row_dot(&self, r: usize, x: &[f64]) -> f64 {
        let (idx, val) = self.row(r);
        idx.iter().zip(val).map(|(&c, v)| v * x[c]).sum()
    }

    /// `out = A x`
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row_dot(r, x);
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    /// `out = Aᵀ y`
    pub fn tr_mul_vec_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (r, &yr) in y.iter().enumerate() {
            if yr == 0.0 {
                continue;
            }
            let (idx, val) = self.row(r);
            for (&c, v) in idx.iter().zip(val) {
                out[c] += v * yr;
            }
        }
    }

    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.tr_mul_vec_into(y, &mut out);
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// `AᵀA` as a dense `cols × cols` matrix.
    pub fn gram(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.cols, self.cols);
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (a, (&i, &vi)) in idx.iter().zip(val).enumerate() {
                for (&j, &vj) in idx[a..].iter().zip(&val[a..]) {
                    g[(i, j)] += vi * vj;
                }
            }
        }
        for i in 0..self.cols {
            for j in 0..i {
                g[(i, j)] = g[(j, i)];
            }
        }
        g
    }

    /// Squared spectral norm `‖A‖₂²`.
    ///
    /// Exact (dense symmetric eigensolve on the smaller Gram matrix) up to
    /// 2000 columns or rows; above that a power iteration with a 1% upward
    /// safety margin.
    pub fn spectral_norm_sq(&self) -> f64 {
        if self.nnz() == 0 {
            return 0.0;
        }
        let small = self.rows.min(self.cols);
        if small <= 2000 {
            let gram = if self.cols <= self.rows {
                self.gram()
            } else {
                let d = self.to_dense();
                &d * d.transpose()
            };
            let eig = SymmetricEigen::new(gram);
            return eig.eigenvalues.iter().fold(0.0_f64, |m, &v| m.max(v));
        }
        let mut v = vec![1.0 / (self.cols as f64).sqrt(); self.cols];
        let mut est = 0.0;
        for _ in 0..500 {
            let av = self.mul_vec(&v);
            let w = self.tr_mul_vec(&av);
            let nw = linalg::norm(&w);
            if nw == 0.0 {
                return 0.0;
            }
            let next = nw;
            v = w.into_iter().map(|x| x / nw).collect();
            if (next - est).abs() <= 1e-12 * next {
                est = next;
                break;
            }
            est = next;
        }
        est * 1.01
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_columns() {
        let err = SparseMatrix::new(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]);
        assert!(err.is_err());
        let err = SparseMatrix::new(1, 3, vec![0, 2], vec![1, 1], vec![1.0, 1.0]);
        assert!(err.is_err());
        let err = SparseMatrix::new(1, 2, vec![0, 1], vec![2], vec![1.0]);
        assert!(err.is_err());
        let err = SparseMatrix::new(2, 2, vec![0, 1], vec![0], vec![1.0]);
        assert!(err.is_err());
    }

    #[test]
    fn products_match_dense() {
        let data = [1.0, 0.0, 2.0, 0.0, -3.0, 4.0];
        let a = SparseMatrix::from_dense(2, 3, &data).unwrap();
        assert_eq!(a.nnz(), 4);
        assert_eq!(a.mul_vec(&[1.0, 2.0, 3.0]), vec![7.0, 6.0]);
        assert_eq!(a.tr_mul_vec(&[1.0, -1.0]), vec![1.0, 3.0, -2.0]);
        let d = a.to_dense();
        assert_eq!(d[(1, 2)], 4.0);
        let g = a.gram();
        let expect = d.transpose() * &d;
        assert!((g - expect).abs().max() < 1e-14);
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = SparseMatrix::from_triplets(2, 2, &[(1, 1, 1.0), (0, 1, 2.0), (1, 1, 3.0)]).unwrap();
        assert_eq!(a.offsets(), &[0, 1, 2]);
        assert_eq!(a.values(), &[2.0, 4.0]);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = SparseMatrix::from_dense(2, 2, &[3.0, 0.0, 0.0, -5.0]).unwrap();
        assert!((a.spectral_norm_sq() - 25.0).abs() < 1e-10);
        assert!((SparseMatrix::identity(4).spectral_norm_sq() - 1.0).abs() < 1e-12);
        assert_eq!(SparseMatrix::zeros(3, 3).spectral_norm_sq(), 0.0);
    }
}
