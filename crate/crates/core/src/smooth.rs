//! Smooth convex terms `f` with value and gradient oracles.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, OracleError, Result};
use crate::linalg;
use crate::sparse::SparseMatrix;

/// A convex function with locally Lipschitz gradient.
///
/// Implementations hold no iterate state, so one instance can serve many
/// concurrent solver runs.
pub trait SmoothFunction: Send + Sync {
    fn dimension(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes `∇f(x)` into `out`.
    fn gradient(&self, x: &[f64], out: &mut [f64]) -> Result<(), OracleError>;

    /// A global Lipschitz modulus of `∇f`, when one is known.
    fn lipschitz(&self) -> Option<f64> {
        None
    }
}

/// `f ≡ 0`
#[derive(Debug, Clone, Copy)]
pub struct ZeroSmooth {
    pub dim: usize,
}

impl SmoothFunction for ZeroSmooth {
    fn dimension(&self) -> usize {
        self.dim
    }
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn gradient(&self, _x: &[f64], out: &mut [f64]) -> Result<(), OracleError> {
        out.iter_mut().for_each(|o| *o = 0.0);
        Ok(())
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// `½xᵀHx + cᵀx + offset` with `H` symmetric positive semidefinite.
#[derive(Debug, Clone)]
pub struct Quadratic {
    hessian: DMatrix<f64>,
    linear: Vec<f64>,
    offset: f64,
    lipschitz: f64,
}

impl Quadratic {
    pub fn new(hessian: DMatrix<f64>, linear: Vec<f64>, offset: f64) -> Result<Self> {
        let n = hessian.nrows();
        if hessian.ncols() != n {
            return Err(Error::InvalidMatrix("hessian must be square".into()));
        }
        if linear.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: linear.len() });
        }
        let scale = hessian.amax().max(1.0);
        let asym = (&hessian - hessian.transpose()).amax();
        if asym > 1e-10 * scale {
            return Err(Error::InvalidMatrix(format!(
                "hessian is not symmetric (max asymmetry {asym:e})"
            )));
        }
        let eig = SymmetricEigen::new(hessian.clone());
        let lipschitz = eig.eigenvalues.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
        Ok(Self { hessian, linear, offset, lipschitz })
    }

    /// `(1/2)Σ dᵢ xᵢ²`
    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)), vec![0.0; n], 0.0)
            .expect("diagonal hessian is symmetric")
    }

    /// `(scale/2)‖x − center‖²`
    pub fn shifted(scale: f64, center: &[f64]) -> Self {
        let n = center.len();
        let linear = center.iter().map(|c| -scale * c).collect();
        let offset = 0.5 * scale * linalg::norm_sq(center);
        Self::new(DMatrix::identity(n, n) * scale, linear, offset).expect("isotropic hessian")
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    fn hess_mul(&self, x: &[f64]) -> DVector<f64> {
        &self.hessian * DVector::from_column_slice(x)
    }
}

impl SmoothFunction for Quadratic {
    fn dimension(&self) -> usize {
        self.linear.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let hx = self.hess_mul(x);
        0.5 * linalg::dot(x, hx.as_slice()) + linalg::dot(&self.linear, x) + self.offset
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) -> Result<(), OracleError> {
        if x.len() != self.dimension() {
            return Err(OracleError::Dimension { expected: self.dimension(), got: x.len() });
        }
        let hx = self.hess_mul(x);
        for ((o, h), c) in out.iter_mut().zip(hx.iter()).zip(&self.linear) {
            *o = h + c;
        }
        Ok(())
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }
}

/// `½‖Ax − b‖²`
#[derive(Debug)]
pub struct LeastSquares {
    matrix: SparseMatrix,
    rhs: Vec<f64>,
    lipschitz: OnceLock<f64>,
}

impl LeastSquares {
    pub fn new(matrix: SparseMatrix, rhs: Vec<f64>) -> Result<Self> {
        if rhs.len() != matrix.rows() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), got: rhs.len() });
        }
        Ok(Self { matrix, rhs, lipschitz: OnceLock::new() })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.matrix.mul_vec(x);
        for (ri, bi) in r.iter_mut().zip(&self.rhs) {
            *ri -= bi;
        }
        r
    }
}

impl SmoothFunction for LeastSquares {
    fn dimension(&self) -> usize {
        self.matrix.cols()
    }
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * linalg::norm_sq(&self.residual(x))
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) -> Result<(), OracleError> {
        if x.len() != self.dimension() {
            return Err(OracleError::Dimension { expected: self.dimension(), got: x.len() });
        }
        self.matrix.tr_mul_vec_into(&self.residual(x), out);
        Ok(())
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(*self.lipschitz.get_or_init(|| self.matrix.spectral_norm_sq()))
    }
}

/// Mean logistic loss `(1/m)Σ log(1 + exp(−yᵢ aᵢᵀw))` with labels in `{−1, +1}`.
#[derive(Debug)]
pub struct LogisticLoss {
    features: SparseMatrix,
    labels: Vec<f64>,
    lipschitz: OnceLock<f64>,
}

/// `log(1 + exp(t))` without overflow.
pub(crate) fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// `1 / (1 + exp(−t))` without overflow.
pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl LogisticLoss {
    pub fn new(features: SparseMatrix, labels: Vec<f64>) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::DimensionMismatch { expected: features.rows(), got: labels.len() });
        }
        if features.rows() == 0 {
            return Err(Error::InvalidDataset("logistic loss needs at least one sample".into()));
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidDataset(format!("label {bad} is not in {{-1, +1}}")));
        }
        Ok(Self { features, labels, lipschitz: OnceLock::new() })
    }

    pub fn features(&self) -> &SparseMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Hessian at the origin, `(1/4m)AᵀA`.
    pub fn hessian_at_zero(&self) -> DMatrix<f64> {
        self.features.gram() / (4.0 * self.labels.len() as f64)
    }
}

impl SmoothFunction for LogisticLoss {
    fn dimension(&self) -> usize {
        self.features.cols()
    }
    fn value(&self, w: &[f64]) -> f64 {
        let m = self.labels.len() as f64;
        let total: f64 = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, &y)| softplus(-y * self.features.row_dot(i, w)))
            .sum();
        total / m
    }
    fn gradient(&self, w: &[f64], out: &mut [f64]) -> Result<(), OracleError> {
        if w.len() != self.dimension() {
            return Err(OracleError::Dimension { expected: self.dimension(), got: w.len() });
        }
        let m = self.labels.len() as f64;
        let weights: Vec<f64> = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, &y)| -y * sigmoid(-y * self.features.row_dot(i, w)) / m)
            .collect();
        self.features.tr_mul_vec_into(&weights, out);
        Ok(())
    }
    /// The classical bound `‖A‖²/(4m)`.
    fn lipschitz(&self) -> Option<f64> {
        Some(*self.lipschitz.get_or_init(|| {
            self.features.spectral_norm_sq() / (4.0 * self.labels.len() as f64)
        }))
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// Smooth term backed by closures.
pub struct FnSmooth {
    dim: usize,
    value: Box<ValueFn>,
    gradient: Box<GradFn>,
    lipschitz: Option<f64>,
}

impl FnSmooth {
    pub fn new(
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self { dim, value: Box::new(value), gradient: Box::new(gradient), lipschitz: None }
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }
}

impl SmoothFunction for FnSmooth {
    fn dimension(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) -> Result<(), OracleError> {
        (self.gradient)(x, out);
        if !linalg::all_finite(out) {
            return Err(OracleError::NonFinite("gradient"));
        }
        Ok(())
    }
    fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }
}
