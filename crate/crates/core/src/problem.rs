//! Composite problems `minimize φ(x) = f(x) + g(x)`.

use std::sync::Arc;

use crate::error::{Error, OracleError, Result};
use crate::extended::ExtendedReal;
use crate::linalg;
use crate::prox::ProxFunction;
use crate::smooth::SmoothFunction;

/// Dense decision vector.
pub type Point = Vec<f64>;

/// Oracle pair defining a composite problem: smooth `f` (value, gradient)
/// and nonsmooth `g` (value, prox). Immutable and cheap to clone.
#[derive(Clone)]
pub struct CompositeProblem {
    smooth: Arc<dyn SmoothFunction>,
    nonsmooth: Arc<dyn ProxFunction>,
    dimension: usize,
}

impl std::fmt::Debug for CompositeProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompositeProblem")
            .field("dimension", &self.dimension)
            .field("nonsmooth", &self.nonsmooth.name())
            .finish()
    }
}

impl CompositeProblem {
    pub fn new(smooth: impl SmoothFunction + 'static, nonsmooth: impl ProxFunction + 'static) -> Self {
        Self::from_arcs(Arc::new(smooth), Arc::new(nonsmooth))
    }

    pub fn from_arcs(smooth: Arc<dyn SmoothFunction>, nonsmooth: Arc<dyn ProxFunction>) -> Self {
        let dimension = smooth.dimension();
        Self { smooth, nonsmooth, dimension }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn smooth(&self) -> &dyn SmoothFunction {
        self.smooth.as_ref()
    }

    pub fn nonsmooth(&self) -> &dyn ProxFunction {
        self.nonsmooth.as_ref()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, got: x.len() });
        }
        Ok(())
    }

    /// `φ(x) = f(x) + g(x)`, possibly `+∞` outside `dom g`.
    pub fn evaluate_objective(&self, x: &[f64]) -> Result<ExtendedReal> {
        self.check_dim(x)?;
        Ok(self.nonsmooth.value(x) + self.smooth.value(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Point, OracleError> {
        let mut g = vec![0.0; self.dimension];
        self.smooth.gradient(x, &mut g)?;
        Ok(g)
    }

    /// `prox_{γg}(x − γ∇f(x))` given a precomputed gradient at `x`.
    pub fn forward_backward(&self, x: &[f64], grad: &[f64], gamma: f64) -> Result<Point, OracleError> {
        let mut v = vec![0.0; self.dimension];
        linalg::step_into(x, gamma, grad, &mut v);
        let mut out = vec![0.0; self.dimension];
        self.nonsmooth.prox(&v, gamma, &mut out)?;
        Ok(out)
    }

    /// One proximal gradient step `prox_{γg}(x − γ∇f(x))`.
    pub fn proximal_gradient_step(&self, x: &[f64], gamma: f64) -> Result<Point> {
        self.check_dim(x)?;
        if !(gamma > 0.0) {
            return Err(Error::NonPositiveStepsize(gamma));
        }
        let grad = self.gradient(x)?;
        Ok(self.forward_backward(x, &grad, gamma)?)
    }

    /// Fixed-point residual `‖x − prox_{γg}(x − γ∇f(x))‖ / γ`.
    pub fn fixed_point_residual(&self, x: &[f64], grad: &[f64], gamma: f64) -> Result<f64, OracleError> {
        let p = self.forward_backward(x, grad, gamma)?;
        Ok(linalg::dist(x, &p) / gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox::{BoxIndicator, L1Norm, Zero};
    use crate::smooth::{LeastSquares, Quadratic, ZeroSmooth};
    use crate::sparse::SparseMatrix;

    #[test]
    fn objective_examples() {
        let p = CompositeProblem::new(Quadratic::diagonal(&[1.0, 1.0]), Zero);
        assert_eq!(p.evaluate_objective(&[1.0, 1.0]).unwrap(), ExtendedReal::Finite(1.0));

        let p = CompositeProblem::new(ZeroSmooth { dim: 1 }, BoxIndicator::new(0.0, f64::INFINITY));
        assert_eq!(p.evaluate_objective(&[-1.0]).unwrap(), ExtendedReal::Infinity);

        assert!(matches!(
            p.evaluate_objective(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn lasso_objective_matches_dense_evaluation() {
        let dense = [1.0, -2.0, 0.0, 0.5, 3.0, 1.0];
        let a = SparseMatrix::from_dense(3, 2, &dense).unwrap();
        let b = vec![1.0, 0.0, -1.0];
        let lambda = 0.3;
        let p = CompositeProblem::new(LeastSquares::new(a, b.clone()).unwrap(), L1Norm::new(lambda));
        let x = [0.7, -1.1];
        let mut oracle = 0.0;
        for r in 0..3 {
            let ax = dense[2 * r] * x[0] + dense[2 * r + 1] * x[1];
            oracle += 0.5 * (ax - b[r]).powi(2);
        }
        oracle += lambda * (x[0].abs() + x[1].abs());
        let v = p.evaluate_objective(&x).unwrap().finite().unwrap();
        assert!((v - oracle).abs() <= 1e-14 * oracle.abs());
        // deterministic
        assert_eq!(v.to_bits(), p.evaluate_objective(&x).unwrap().finite().unwrap().to_bits());
    }

    #[test]
    fn proximal_gradient_step_examples() {
        let p = CompositeProblem::new(Quadratic::diagonal(&[1.0]), Zero);
        assert_eq!(p.proximal_gradient_step(&[2.0], 1.0).unwrap(), vec![0.0]);

        let p = CompositeProblem::new(ZeroSmooth { dim: 1 }, L1Norm::new(1.0));
        assert_eq!(p.proximal_gradient_step(&[2.0], 1.0).unwrap(), vec![1.0]);

        let p = CompositeProblem::new(Quadratic::shifted(1.0, &[3.0, 0.0]), L1Norm::new(1.0));
        assert_eq!(p.proximal_gradient_step(&[0.0, 0.0], 0.5).unwrap(), vec![1.0, 0.0]);

        assert!(matches!(p.proximal_gradient_step(&[0.0, 0.0], 0.0), Err(Error::NonPositiveStepsize(_))));
        assert!(matches!(p.proximal_gradient_step(&[0.0, 0.0], -1.0), Err(Error::NonPositiveStepsize(_))));
    }

    #[test]
    fn short_steps_descend_on_quadratics() {
        let h = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let q = Quadratic::new(h, vec![-1.0, 0.3], 0.0).unwrap();
        let l = q.lipschitz().unwrap();
        let p = CompositeProblem::new(q, L1Norm::new(0.2));
        let mut x = vec![3.0, -2.0];
        for _ in 0..20 {
            let next = p.proximal_gradient_step(&x, 1.0 / l).unwrap();
            assert!(p.evaluate_objective(&next).unwrap() <= p.evaluate_objective(&x).unwrap());
            x = next;
        }
    }
}
