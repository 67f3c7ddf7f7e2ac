//! Closed-form proximal operators.
//!
//! Every regularizer implements [`ProxFunction`]: a value oracle over the
//! extended reals and `prox_{γg}(v) = argmin_u g(u) + ‖u − v‖² / (2γ)`.
//! Conjugate values are provided where they have a closed form; they are
//! only needed for duality-gap diagnostics.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::extended::ExtendedReal;
use crate::linalg;

/// A proper, closed, convex function with an easy proximal map.
pub trait ProxFunction: Send + Sync {
    fn name(&self) -> &'static str;

    /// Scalar parameters identifying the instance (e.g. `[λ]`).
    fn parameters(&self) -> Vec<f64>;

    fn value(&self, x: &[f64]) -> ExtendedReal;

    /// Writes `prox_{γg}(v)` into `out`.
    fn prox(&self, v: &[f64], gamma: f64, out: &mut [f64]) -> Result<(), OracleError>;

    /// Value of the convex conjugate `g*(y)`, if available in closed form.
    fn conjugate_value(&self, _y: &[f64]) -> Option<ExtendedReal> {
        None
    }
}

/// Serializable description of a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regularizer {
    Zero,
    L1 { lambda: f64 },
    SquaredL2 { lambda: f64 },
    Box { lower: f64, upper: f64 },
    CubicNorm { sigma: f64 },
}

impl Regularizer {
    pub fn build(self) -> Box<dyn ProxFunction> {
        match self {
            Regularizer::Zero => Box::new(Zero),
            Regularizer::L1 { lambda } => Box::new(L1Norm::new(lambda)),
            Regularizer::SquaredL2 { lambda } => Box::new(SquaredL2::new(lambda)),
            Regularizer::Box { lower, upper } => Box::new(BoxIndicator::new(lower, upper)),
            Regularizer::CubicNorm { sigma } => Box::new(CubicNorm::new(sigma)),
        }
    }
}

fn check_len(v: &[f64], out: &[f64]) -> Result<(), OracleError> {
    if v.len() != out.len() {
        return Err(OracleError::Dimension { expected: v.len(), got: out.len() });
    }
    Ok(())
}

/// Componentwise soft-thresholding `sign(vᵢ)·max(|vᵢ| − t, 0)`.
pub fn prox_l1(v: &[f64], threshold: f64) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    soft_threshold_into(v, threshold, &mut out);
    out
}

fn soft_threshold_into(v: &[f64], t: f64, out: &mut [f64]) {
    for (o, &x) in out.iter_mut().zip(v) {
        *o = if x > t {
            x - t
        } else if x < -t {
            x + t
        } else {
            0.0
        };
    }
}

/// Prox of `(σ/3)‖·‖³` with `scale = γσ`: returns `(r/‖v‖)·v` where `r ≥ 0`
/// solves `r + scale·r² = ‖v‖`.
pub fn prox_cubic(v: &[f64], scale: f64) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    cubic_into(v, scale, &mut out);
    out
}

fn cubic_into(v: &[f64], scale: f64, out: &mut [f64]) {
    let nv = linalg::norm(v);
    if nv == 0.0 {
        out.iter_mut().for_each(|o| *o = 0.0);
        return;
    }
    // r = 2‖v‖ / (1 + √(1 + 4·scale·‖v‖)), free of cancellation for small scale
    let r = 2.0 * nv / (1.0 + (1.0 + 4.0 * scale * nv).sqrt());
    let factor = r / nv;
    for (o, &x) in out.iter_mut().zip(v) {
        *o = factor * x;
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl ProxFunction for Zero {
    fn name(&self) -> &'static str {
        "zero"
    }
    fn parameters(&self) -> Vec<f64> {
        vec![]
    }
    fn value(&self, _x: &[f64]) -> ExtendedReal {
        ExtendedReal::ZERO
    }
    fn prox(&self, v: &[f64], _gamma: f64, out: &mut [f64]) -> Result<(), OracleError> {
        check_len(v, out)?;
        out.copy_from_slice(v);
        Ok(())
    }
    fn conjugate_value(&self, y: &[f64]) -> Option<ExtendedReal> {
        Some(if y.iter().all(|&v| v == 0.0) { ExtendedReal::ZERO } else { ExtendedReal::Infinity })
    }
}

/// `λ‖x‖₁`
#[derive(Debug, Clone, Copy)]
pub struct L1Norm {
    pub lambda: f64,
}

impl L1Norm {
    pub fn new(lambda: f64) -> Self {
        assert!(lambda >= 0.0, "l1 weight must be nonnegative");
        Self { lambda }
    }
}

impl ProxFunction for L1Norm {
    fn name(&self) -> &'static str {
        "l1"
    }
    fn parameters(&self) -> Vec<f64> {
        vec![self.lambda]
    }
    fn value(&self, x: &[f64]) -> ExtendedReal {
        ExtendedReal::Finite(self.lambda * linalg::norm_l1(x))
    }
    fn prox(&self, v: &[f64], gamma: f64, out: &mut [f64]) -> Result<(), OracleError> {
        check_len(v, out)?;
        soft_threshold_into(v, gamma * self.lambda, out);
        Ok(())
    }
    fn conjugate_value(&self, y: &[f64]) -> Option<ExtendedReal> {
        // indicator of the ℓ∞ ball of radius λ, with a rounding allowance
        Some(if linalg::norm_inf(y) <= self.lambda * (1.0 + 1e-12) {
            ExtendedReal::ZERO
        } else {
            ExtendedReal::Infinity
        })
    }
}

/// `(λ/2)‖x‖²`
#[derive(Debug, Clone, Copy)]
pub struct SquaredL2 {
    pub lambda: f64,
}

impl SquaredL2 {
    pub fn new(lambda: f64) -> Self {
        assert!(lambda >= 0.0, "squared-l2 weight must be nonnegative");
        Self { lambda }
    }
}

impl ProxFunction for SquaredL2 {
    fn name(&self) -> &'static str {
        "squared_l2"
    }
    fn parameters(&self) -> Vec<f64> {
        vec![self.lambda]
    }
    fn value(&self, x: &[f64]) -> ExtendedReal {
        ExtendedReal::Finite(0.5 * self.lambda * linalg::norm_sq(x))
    }
    fn prox(&self, v: &[f64], gamma: f64, out: &mut [f64]) -> Result<(), OracleError> {
        check_len(v, out)?;
        let s = 1.0 / (1.0 + gamma * self.lambda);
        for (o, &x) in out.iter_mut().zip(v) {
            *o = s * x;
        }
        Ok(())
    }
    fn conjugate_value(&self, y: &[f64]) -> Option<ExtendedReal> {
        if self.lambda == 0.0 {
            return Zero.conjugate_value(y);
        }
        Some(ExtendedReal::Finite(linalg::norm_sq(y) / (2.0 * self.lambda)))
    }
}

/// Indicator of the box `[lower, upper]ⁿ`.
#[derive(Debug, Clone, Copy)]
pub struct BoxIndicator {
    pub lower: f64,
    pub upper: f64,
}

impl BoxIndicator {
    pub fn new(lower: f64, upper: f64) -> Self {
        assert!(lower <= upper, "empty box");
        Self { lower, upper }
    }

    pub fn symmetric(radius: f64) -> Self {
        Self::new(-radius, radius)
    }
}

impl ProxFunction for BoxIndicator {
    fn name(&self) -> &'static str {
        "box"
    }
    fn parameters(&self) -> Vec<f64> {
        vec![self.lower, self.upper]
    }
    fn value(&self, x: &[f64]) -> ExtendedReal {
        if x.iter().all(|&v| v >= self.lower && v <= self.upper) {
            ExtendedReal::ZERO
        } else {
            ExtendedReal::Infinity
        }
    }
    fn prox(&self, v: &[f64], _gamma: f64, out: &mut [f64]) -> Result<(), OracleError> {
        check_len(v, out)?;
        for (o, &x) in out.iter_mut().zip(v) {
            *o = x.clamp(self.lower, self.upper);
        }
        Ok(())
    }
    fn conjugate_value(&self, y: &[f64]) -> Option<ExtendedReal> {
        // support function of the box
        let s = y.iter().map(|&v| (self.lower * v).max(self.upper * v)).sum::<f64>();
        Some(ExtendedReal::from(s))
    }
}

/// `(σ/3)‖x‖³`
#[derive(Debug, Clone, Copy)]
pub struct CubicNorm {
    pub sigma: f64,
}

impl CubicNorm {
    pub fn new(sigma: f64) -> Self {
        assert!(sigma >= 0.0, "cubic weight must be nonnegative");
        Self { sigma }
    }
}

impl ProxFunction for CubicNorm {
    fn name(&self) -> &'static str {
        "cubic_norm"
    }
    fn parameters(&self) -> Vec<f64> {
        vec![self.sigma]
    }
    fn value(&self, x: &[f64]) -> ExtendedReal {
        ExtendedReal::Finite(self.sigma / 3.0 * linalg::norm(x).powi(3))
    }
    fn prox(&self, v: &[f64], gamma: f64, out: &mut [f64]) -> Result<(), OracleError> {
        check_len(v, out)?;
        cubic_into(v, gamma * self.sigma, out);
        Ok(())
    }
    fn conjugate_value(&self, y: &[f64]) -> Option<ExtendedReal> {
        if self.sigma == 0.0 {
            return Zero.conjugate_value(y);
        }
        let n = linalg::norm(y);
        Some(ExtendedReal::Finite(2.0 / 3.0 * n * n.sqrt() / self.sigma.sqrt()))
    }
}

/// Cached Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct SpdSolver {
    chol: Cholesky<f64, Dyn>,
    matrix: DMatrix<f64>,
}

impl SpdSolver {
    pub fn new(q: DMatrix<f64>) -> Result<Self, OracleError> {
        if !q.is_square() {
            return Err(OracleError::NotPositiveDefinite);
        }
        let chol = Cholesky::new(q.clone()).ok_or(OracleError::NotPositiveDefinite)?;
        Ok(Self { chol, matrix: q })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `Q⁻¹ rhs`
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, OracleError> {
        if rhs.len() != self.dim() {
            return Err(OracleError::Dimension { expected: self.dim(), got: rhs.len() });
        }
        let x = self.chol.solve(&DVector::from_column_slice(rhs));
        if !x.iter().all(|v| v.is_finite()) {
            return Err(OracleError::NonFinite("cholesky solve"));
        }
        Ok(x.as_slice().to_vec())
    }
}

/// Minimizer of `½xᵀQx − bᵀx + ⟨c, x⟩`, i.e. `Q⁻¹(b − c)`.
///
/// With `c = Aᵀy` this is the x-update of alternating minimization for a
/// strongly convex quadratic `ψ₁`.
pub fn linearized_argmin_quadratic(
    b: &[f64],
    q_inverse: &SpdSolver,
    c: &[f64],
) -> Result<Vec<f64>, OracleError> {
    if b.len() != c.len() {
        return Err(OracleError::Dimension { expected: b.len(), got: c.len() });
    }
    q_inverse.solve(&linalg::sub(b, c))
}
