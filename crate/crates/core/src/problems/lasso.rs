//! Synthetic Lasso instances with a planted solution.
//!
//! Construction: draw `A ∈ ℝ^{m×n}` and `v ∈ ℝᵐ` with standard normal
//! entries and let `cᵢ = ⟨aᵢ, v⟩` for each column `aᵢ`. Every column on a
//! random support `S` is shifted along `v` so that `cᵢ = λsᵢ` for a random
//! sign `sᵢ`; columns off the support with `|cᵢ| ≥ λ` are shifted so that
//! `|cᵢ| = ξᵢλ` with `ξᵢ ∈ [0.05, 0.95]`. With `x⋆` supported on `S`,
//! `sign(x⋆ᵢ) = sᵢ`, and `b = Ax⋆ + v`, the residual gives
//! `−Aᵀ(Ax⋆ − b) = Aᵀv ∈ λ∂‖x⋆‖₁`, so `x⋆` minimizes `½‖Ax − b‖² + λ‖x‖₁`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{CompositeProblem, Point};
use crate::prox::L1Norm;
use crate::smooth::LeastSquares;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoInstance {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub lambda: f64,
    pub planted_solution: Option<Point>,
    pub seed: Option<u64>,
}

impl LassoInstance {
    /// Number of unknowns.
    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    /// Number of observations.
    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    pub fn problem(&self) -> Result<CompositeProblem> {
        let ls = LeastSquares::new(self.matrix.clone(), self.rhs.clone())?;
        Ok(CompositeProblem::new(ls, L1Norm::new(self.lambda)))
    }

    /// `½‖Ax − b‖² + λ‖x‖₁`
    pub fn objective(&self, x: &[f64]) -> f64 {
        let r = linalg::sub(&self.matrix.mul_vec(x), &self.rhs);
        0.5 * linalg::norm_sq(&r) + self.lambda * linalg::norm_l1(x)
    }

    /// Checks `‖Aᵀ(Ax − b)‖∞ ≤ λ(1 + tol)` and
    /// `|(Aᵀ(Ax − b))ᵢ + λ·sign(xᵢ)| ≤ tol·λ` wherever `xᵢ ≠ 0`.
    pub fn certify(&self, x: &[f64], tol: f64) -> bool {
        let r = linalg::sub(&self.matrix.mul_vec(x), &self.rhs);
        let g = self.matrix.tr_mul_vec(&r);
        let bound = linalg::norm_inf(&g) <= self.lambda * (1.0 + tol);
        let support = x.iter().zip(&g).filter(|(xi, _)| **xi != 0.0).all(|(xi, gi)| {
            (gi + self.lambda * xi.signum()).abs() <= tol * self.lambda
        });
        bound && support
    }
}

/// Generates an `m × n` instance whose planted `s`-sparse solution is
/// optimal by construction. Identical arguments give identical instances.
pub fn generate_lasso(n: usize, m: usize, s: usize, lambda: f64, seed: u64) -> Result<LassoInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameters(format!("dimensions must be positive, got n = {n}, m = {m}")));
    }
    if s > n.min(m) {
        return Err(Error::InvalidParameters(format!("sparsity {s} exceeds min(n, m) = {}", n.min(m))));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameters(format!("lambda must be positive, got {lambda}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // column-major so each column is contiguous
    let mut cols: Vec<Vec<f64>> =
        (0..n).map(|_| (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()).collect();
    let v: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let mut support = sample(&mut rng, n, s).into_vec();
    support.sort_unstable();

    let mut in_support = vec![false; n];
    for &i in &support {
        in_support[i] = true;
    }
    let v_sq = linalg::norm_sq(&v);
    if v_sq == 0.0 {
        return Err(Error::InvalidParameters("degenerate dual vector".into()));
    }
    let mut x_star = vec![0.0; n];
    for (i, col) in cols.iter_mut().enumerate() {
        let c = linalg::dot(col, &v);
        let target = if in_support[i] {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            x_star[i] = sign * rng.random_range(0.5..2.0);
            sign * lambda
        } else if c.abs() >= lambda {
            c.signum() * rng.random_range(0.05..0.95) * lambda
        } else {
            continue;
        };
        linalg::axpy((target - c) / v_sq, &v, col);
    }

    let mut dense = vec![0.0; m * n];
    for (j, col) in cols.iter().enumerate() {
        for (i, a) in col.iter().enumerate() {
            dense[i * n + j] = *a;
        }
    }
    let matrix = SparseMatrix::from_dense(m, n, &dense)?;
    let mut rhs = matrix.mul_vec(&x_star);
    linalg::axpy(1.0, &v, &mut rhs);
    Ok(LassoInstance { matrix, rhs, lambda, planted_solution: Some(x_star), seed: Some(seed) })
}
