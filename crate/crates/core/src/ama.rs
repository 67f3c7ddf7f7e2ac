//! Adaptive alternating minimization for
//! `minimize ψ₁(x) + ψ₂(Ax)`.
//!
//! The method is the adaptive proximal gradient method applied to the dual
//! `minimize ψ₁*(−Aᵀy) + ψ₂*(y)`, written in primal variables: the gradient
//! of the dual smooth term is `−Ax(y)` with `x(y) = argmin ψ₁ + ⟨y, A·⟩`,
//! and the dual prox step becomes a prox step on `ψ₂` through the Moreau
//! decomposition. `ψ₁` must be strictly convex so that `x(y)` is unique;
//! local strong convexity and 1-coercivity are the caller's responsibility.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureEstimates;
use crate::error::{Error, OracleError, Result};
use crate::extended::ExtendedReal;
use crate::linalg;
use crate::problem::{CompositeProblem, Point};
use crate::prox::{ProxFunction, SpdSolver};
use crate::smooth::SmoothFunction;
use crate::solvers::StoppingRule;
use crate::sparse::SparseMatrix;
use crate::stepsize::{adapg_stepsize, FixedParams, StepsizePair};
use crate::trace::StopReason;

/// The `ψ₁` side of the problem, accessed through its linearized argmin.
pub trait LinearizedArgmin: Send + Sync {
    fn dimension(&self) -> usize;

    /// `argmin_x ψ₁(x) + ⟨c, x⟩`
    fn argmin(&self, c: &[f64]) -> Result<Point, OracleError>;

    fn value(&self, x: &[f64]) -> ExtendedReal;

    /// `ψ₁*(w)`, when known in closed form.
    fn conjugate_value(&self, _w: &[f64]) -> Option<f64> {
        None
    }
}

/// `ψ₁(x) = ½xᵀQx − bᵀx` with `Q` positive definite.
#[derive(Debug, Clone)]
pub struct QuadraticPsi {
    solver: SpdSolver,
    b: Vec<f64>,
}

impl QuadraticPsi {
    pub fn new(q: nalgebra::DMatrix<f64>, b: Vec<f64>) -> Result<Self> {
        if q.nrows() != b.len() {
            return Err(Error::DimensionMismatch { expected: q.nrows(), got: b.len() });
        }
        let asym = (&q - q.transpose()).amax();
        if asym > 1e-10 * q.amax().max(1.0) {
            return Err(Error::InvalidMatrix("Q must be symmetric".into()));
        }
        Ok(Self { solver: SpdSolver::new(q)?, b })
    }

    pub fn matrix(&self) -> &nalgebra::DMatrix<f64> {
        self.solver.matrix()
    }

    pub fn linear(&self) -> &[f64] {
        &self.b
    }
}

impl LinearizedArgmin for QuadraticPsi {
    fn dimension(&self) -> usize {
        self.b.len()
    }

    fn argmin(&self, c: &[f64]) -> Result<Point, OracleError> {
        crate::prox::linearized_argmin_quadratic(&self.b, &self.solver, c)
    }

    fn value(&self, x: &[f64]) -> ExtendedReal {
        let qx = self.solver.matrix() * nalgebra::DVector::from_column_slice(x);
        ExtendedReal::Finite(0.5 * linalg::dot(x, qx.as_slice()) - linalg::dot(&self.b, x))
    }

    /// `½(w + b)ᵀQ⁻¹(w + b)`
    fn conjugate_value(&self, w: &[f64]) -> Option<f64> {
        let v: Vec<f64> = w.iter().zip(&self.b).map(|(a, b)| a + b).collect();
        let sol = self.solver.solve(&v).ok()?;
        Some(0.5 * linalg::dot(&v, &sol))
    }
}

/// Problem data: `ψ₁` via its argmin oracle, `ψ₂` via its prox, and `A`.
#[derive(Clone)]
pub struct AmaProblem {
    psi1: Arc<dyn LinearizedArgmin>,
    psi2: Arc<dyn ProxFunction>,
    matrix: SparseMatrix,
}

impl std::fmt::Debug for AmaProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AmaProblem")
            .field("rows", &self.matrix.rows())
            .field("cols", &self.matrix.cols())
            .field("psi2", &self.psi2.name())
            .finish()
    }
}

impl AmaProblem {
    pub fn new(
        psi1: impl LinearizedArgmin + 'static,
        psi2: impl ProxFunction + 'static,
        matrix: SparseMatrix,
    ) -> Result<Self> {
        Self::from_arcs(Arc::new(psi1), Arc::new(psi2), matrix)
    }

    pub fn from_arcs(
        psi1: Arc<dyn LinearizedArgmin>,
        psi2: Arc<dyn ProxFunction>,
        matrix: SparseMatrix,
    ) -> Result<Self> {
        if matrix.cols() != psi1.dimension() {
            return Err(Error::DimensionMismatch { expected: psi1.dimension(), got: matrix.cols() });
        }
        Ok(Self { psi1, psi2, matrix })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn psi1(&self) -> &dyn LinearizedArgmin {
        self.psi1.as_ref()
    }

    pub fn psi2(&self) -> &dyn ProxFunction {
        self.psi2.as_ref()
    }

    /// Primal dimension `n`.
    pub fn primal_dim(&self) -> usize {
        self.matrix.cols()
    }

    /// Dual dimension `m`.
    pub fn dual_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `x(y) = argmin ψ₁ + ⟨y, A·⟩`
    pub fn primal_from_dual(&self, y: &[f64]) -> Result<Point, OracleError> {
        let x = self.psi1.argmin(&self.matrix.tr_mul_vec(y))?;
        if x.len() != self.primal_dim() {
            return Err(OracleError::Dimension { expected: self.primal_dim(), got: x.len() });
        }
        if !linalg::all_finite(&x) {
            return Err(OracleError::NonFinite("linearized argmin"));
        }
        Ok(x)
    }

    /// `ψ₁(x) + ψ₂(Ax)`
    pub fn primal_objective(&self, x: &[f64]) -> ExtendedReal {
        self.psi1.value(x) + self.psi2.value(&self.matrix.mul_vec(x))
    }

    /// `ψ₁*(−Aᵀy) + ψ₂*(y)`, when both conjugates are known.
    pub fn dual_objective(&self, y: &[f64]) -> Option<ExtendedReal> {
        let w: Vec<f64> = self.matrix.tr_mul_vec(y).iter().map(|v| -v).collect();
        let c1 = self.psi1.conjugate_value(&w)?;
        let c2 = self.psi2.conjugate_value(y)?;
        Some(c2 + c1)
    }

    /// The dual as a composite problem `f(y) = ψ₁*(−Aᵀy)`, `g = ψ₂*`.
    /// Needs both conjugate values in closed form.
    pub fn dual_composite(&self) -> Result<CompositeProblem> {
        let probe = vec![0.0; self.dual_dim()];
        if self.dual_objective(&probe).is_none() {
            return Err(Error::Missing("closed-form conjugates of both terms".into()));
        }
        let smooth = DualSmooth { problem: self.clone() };
        let nonsmooth = ConjugateProx { inner: self.psi2.clone() };
        Ok(CompositeProblem::new(smooth, nonsmooth))
    }
}

struct DualSmooth {
    problem: AmaProblem,
}

impl SmoothFunction for DualSmooth {
    fn dimension(&self) -> usize {
        self.problem.dual_dim()
    }

    fn value(&self, y: &[f64]) -> f64 {
        let w: Vec<f64> = self.problem.matrix.tr_mul_vec(y).iter().map(|v| -v).collect();
        self.problem.psi1.conjugate_value(&w).unwrap_or(f64::NAN)
    }

    /// `−A x(y)`
    fn gradient(&self, y: &[f64], out: &mut [f64]) -> Result<(), OracleError> {
        let x = self.problem.primal_from_dual(y)?;
        self.problem.matrix.mul_vec_into(&x, out);
        out.iter_mut().for_each(|v| *v = -*v);
        Ok(())
    }
}

/// `h*` through the Moreau decomposition
/// `prox_{γh*}(v) = v − γ·prox_{h/γ}(v/γ)`.
pub struct ConjugateProx {
    inner: Arc<dyn ProxFunction>,
}

impl ConjugateProx {
    pub fn new(inner: Arc<dyn ProxFunction>) -> Self {
        Self { inner }
    }
}

impl ProxFunction for ConjugateProx {
    fn name(&self) -> &'static str {
        "conjugate"
    }

    fn parameters(&self) -> Vec<f64> {
        self.inner.parameters()
    }

    fn value(&self, y: &[f64]) -> ExtendedReal {
        self.inner.conjugate_value(y).unwrap_or(ExtendedReal::Infinity)
    }

    fn prox(&self, v: &[f64], gamma: f64, out: &mut [f64]) -> Result<(), OracleError> {
        let scaled: Vec<f64> = v.iter().map(|x| x / gamma).collect();
        self.inner.prox(&scaled, 1.0 / gamma, out)?;
        for (o, x) in out.iter_mut().zip(v) {
            *o = x - gamma * *o;
        }
        Ok(())
    }
}

/// Dual curvature estimates:
///
/// ```text
/// ℓₖ = −⟨Axᵏ − Axᵏ⁻¹, yᵏ − yᵏ⁻¹⟩ / ‖yᵏ − yᵏ⁻¹‖²
/// Lₖ =  ‖Axᵏ − Axᵏ⁻¹‖ / ‖yᵏ − yᵏ⁻¹‖
/// ```
///
/// `Lₖ` is the plain norm ratio, not the ratio of squared norms.
pub fn ama_curvature(
    x_prev: &[f64],
    x_curr: &[f64],
    y_prev: &[f64],
    y_curr: &[f64],
    a: &SparseMatrix,
) -> CurvatureEstimates {
    let dax = a.mul_vec(&linalg::sub(x_curr, x_prev));
    let dy = linalg::sub(y_curr, y_prev);
    CurvatureEstimates::from_products(-linalg::dot(&dax, &dy), linalg::norm_sq(&dax), linalg::norm_sq(&dy))
}

fn from_ax(ax_prev: &[f64], ax_curr: &[f64], y_prev: &[f64], y_curr: &[f64]) -> CurvatureEstimates {
    let mut dot = 0.0;
    let mut dax_sq = 0.0;
    let mut dy_sq = 0.0;
    for i in 0..ax_curr.len() {
        let da = ax_curr[i] - ax_prev[i];
        let dy = y_curr[i] - y_prev[i];
        dot -= da * dy;
        dax_sq += da * da;
        dy_sq += dy * dy;
    }
    CurvatureEstimates::from_products(dot, dax_sq, dy_sq)
}

/// One row of an alternating-minimization trace; record `k` describes
/// `(xᵏ, zᵏ, yᵏ)` and the stepsize `γₖ` that produced `yᵏ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmaRecord {
    pub k: usize,
    pub gamma: f64,
    pub rho: f64,
    pub ell: f64,
    pub big_l: f64,
    /// `‖Axᵏ − zᵏ‖`
    pub primal_residual: f64,
    /// `‖Aᵀ(yᵏ − yᵏ⁻¹)‖`
    pub dual_residual: f64,
    /// `ψ₁(xᵏ) + ψ₂(Axᵏ) + ψ₁*(−Aᵀyᵏ) + ψ₂*(yᵏ)`, when the conjugates are known.
    pub duality_gap: Option<ExtendedReal>,
    pub argmin_evals: u64,
    pub prox_evals: u64,
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmaTrace {
    pub params: FixedParams,
    pub y_init: Point,
    pub records: Vec<AmaRecord>,
    pub stop_reason: StopReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmaSolution {
    pub x: Point,
    pub y: Point,
    pub z: Point,
    pub trace: AmaTrace,
}

/// Adaptive alternating minimization with constant parameters `(q, r)`.
///
/// From `y⁻¹ = y_init` and `γ₀ = γ₋₁`:
/// `x⁻¹ = x(y⁻¹)`, `z⁰ = prox_{ψ₂/γ₀}(y⁻¹/γ₀ + Ax⁻¹)`,
/// `y⁰ = y⁻¹ + γ₀(Ax⁻¹ − z⁰)`; then for `k = 0, 1, …`
///
/// ```text
/// xᵏ   = argmin ψ₁ + ⟨yᵏ, A·⟩
/// γₖ₊₁ = adaptive update with the dual curvature estimates
/// zᵏ⁺¹ = prox_{ψ₂/γₖ₊₁}(yᵏ/γₖ₊₁ + Axᵏ)
/// yᵏ⁺¹ = yᵏ + γₖ₊₁(Axᵏ − zᵏ⁺¹)
/// ```
///
/// Stops when `max{‖Axᵏ − zᵏ‖, ‖Aᵀ(yᵏ − yᵏ⁻¹)‖} ≤ tol`.
pub fn run_adaama(
    problem: &AmaProblem,
    y_init: &[f64],
    gamma0: f64,
    params: FixedParams,
    stop: StoppingRule,
) -> Result<AmaSolution> {
    let params = FixedParams::new(params.q, params.r)?;
    stop.validate()?;
    if y_init.len() != problem.dual_dim() {
        return Err(Error::DimensionMismatch { expected: problem.dual_dim(), got: y_init.len() });
    }
    if !(gamma0 > 0.0) || !gamma0.is_finite() {
        return Err(Error::NonPositiveStepsize(gamma0));
    }
    let a = &problem.matrix;
    let m = problem.dual_dim();
    let start = Instant::now();
    let mut argmin_evals = 0u64;
    let mut prox_evals = 0u64;

    let z_step = |y: &[f64], ax: &[f64], gamma: f64, iteration: usize| -> Result<Point> {
        let v: Vec<f64> = y.iter().zip(ax).map(|(yi, ai)| yi / gamma + ai).collect();
        let mut z = vec![0.0; m];
        problem.psi2.prox(&v, 1.0 / gamma, &mut z).map_err(Error::at(iteration))?;
        Ok(z)
    };
    let y_step = |y: &[f64], ax: &[f64], z: &[f64], gamma: f64| -> Point {
        y.iter().zip(ax).zip(z).map(|((yi, ai), zi)| yi + gamma * (ai - zi)).collect()
    };

    let x_init = problem.primal_from_dual(y_init).map_err(Error::at(0))?;
    argmin_evals += 1;
    let mut ax_prev = a.mul_vec(&x_init);
    let mut z = z_step(y_init, &ax_prev, gamma0, 0)?;
    prox_evals += 1;
    let mut y_prev = y_init.to_vec();
    let mut y = y_step(y_init, &ax_prev, &z, gamma0);
    let mut sp = StepsizePair::initial(gamma0);
    let mut records = Vec::new();
    let mut k = 0;

    let (reason, x) = loop {
        if !linalg::all_finite(&y) {
            return Err(Error::NonFiniteIterate { iteration: k });
        }
        let x = problem.primal_from_dual(&y).map_err(Error::at(k))?;
        argmin_evals += 1;
        let ax = a.mul_vec(&x);
        let est = from_ax(&ax_prev, &ax, &y_prev, &y);

        let primal_residual = linalg::dist(&ax, &z);
        let dual_residual = linalg::norm(&a.tr_mul_vec(&linalg::sub(&y, &y_prev)));
        let duality_gap = problem.dual_objective(&y).map(|d| d + problem.primal_objective(&x));
        records.push(AmaRecord {
            k,
            gamma: sp.gamma_curr,
            rho: sp.rho,
            ell: est.ell,
            big_l: est.big_l,
            primal_residual,
            dual_residual,
            duality_gap,
            argmin_evals,
            prox_evals,
            wall_time: start.elapsed().as_secs_f64(),
            x: stop.keep_iterates.then(|| x.clone()),
            y: stop.keep_iterates.then(|| y.clone()),
            z: stop.keep_iterates.then(|| z.clone()),
        });
        if primal_residual.max(dual_residual) <= stop.tol {
            break (StopReason::Tolerance, x);
        }
        if records.len() >= stop.max_iters {
            break (StopReason::MaxIterations, x);
        }

        let gamma = adapg_stepsize(&sp, est, &params);
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::NonPositiveStepsize(gamma));
        }
        let z_next = z_step(&y, &ax, gamma, k + 1)?;
        prox_evals += 1;
        let y_next = y_step(&y, &ax, &z_next, gamma);
        sp = sp.advance(gamma);
        ax_prev = ax;
        z = z_next;
        y_prev = std::mem::replace(&mut y, y_next);
        k += 1;
    };

    let trace = AmaTrace { params, y_init: y_init.to_vec(), records, stop_reason: reason };
    Ok(AmaSolution { x, y, z, trace })
}
