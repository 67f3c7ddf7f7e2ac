//! Secant estimates of local curvature between consecutive iterates.

use serde::{Deserialize, Serialize};


/// The pair `(ℓₖ, Lₖ)`:
///
/// ```text
/// ℓₖ = ⟨∇f(xᵏ) − ∇f(xᵏ⁻¹), xᵏ − xᵏ⁻¹⟩ / ‖xᵏ − xᵏ⁻¹‖²
/// Lₖ = ‖∇f(xᵏ) − ∇f(xᵏ⁻¹)‖ / ‖xᵏ − xᵏ⁻¹‖
/// ```
///
/// Both are zero when the iterates coincide (`0/0 = 0`). For convex `f`,
/// `0 ≤ ℓₖ ≤ Lₖ` and `Lₖ` never exceeds a Lipschitz modulus of `∇f` on a
/// convex set containing both points.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CurvatureEstimates {
    pub ell: f64,
    pub big_l: f64,
}

impl CurvatureEstimates {
    pub const ZERO: CurvatureEstimates = CurvatureEstimates { ell: 0.0, big_l: 0.0 };

    /// Builds the estimates from the three inner products they depend on.
    /// `dx_sq` is compared against zero exactly.
    pub fn from_products(dot: f64, dg_sq: f64, dx_sq: f64) -> Self {
        if dx_sq == 0.0 {
            return Self::ZERO;
        }
        Self { ell: dot / dx_sq, big_l: (dg_sq / dx_sq).sqrt() }
    }
}

pub fn estimate_curvature(x_prev: &[f64], x_curr: &[f64], g_prev: &[f64], g_curr: &[f64]) -> CurvatureEstimates {
    debug_assert!(x_prev.len() == x_curr.len() && g_prev.len() == g_curr.len());
    let mut dot = 0.0;
    let mut dx_sq = 0.0;
    let mut dg_sq = 0.0;
    for i in 0..x_curr.len() {
        let dx = x_curr[i] - x_prev[i];
        let dg = g_curr[i] - g_prev[i];
        dot += dx * dg;
        dx_sq += dx * dx;
        dg_sq += dg * dg;
    }
    CurvatureEstimates::from_products(dot, dg_sq, dx_sq)
}

/// Absolute-plus-relative tolerance for floating point inequality checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { atol: 1e-9, rtol: 1e-7 }
    }
}

impl Tolerance {
    pub fn new(atol: f64, rtol: f64) -> Self {
        Self { atol, rtol }
    }

    /// Slack allowed for a comparison whose magnitude is `scale`:
    /// `atol + rtol·(1 + |scale|)`.
    pub fn slack(&self, scale: f64) -> f64 {
        self.atol + self.rtol * (1.0 + scale.abs())
    }

    /// `lhs ≤ rhs` up to the slack for `scale`.
    pub fn le(&self, lhs: f64, rhs: f64, scale: f64) -> bool {
        lhs <= rhs + self.slack(scale)
    }
}

/// `ℓ ≥ −tol` and `ℓ ≤ L` (and `L ≤ L_ref` when a reference modulus is given).
pub fn curvature_order_holds(est: CurvatureEstimates, lipschitz: Option<f64>, tol: Tolerance) -> bool {
    let scale = est.big_l.max(est.ell.abs());
    let ordered = tol.le(0.0, est.ell, scale) && tol.le(est.ell, est.big_l, scale);
    match lipschitz {
        Some(l) => ordered && tol.le(est.big_l, l, l.max(scale)),
        None => ordered,
    }
}

/// Squared norm of the secant of `id − γ∇f`: `(1 − 2γℓ + γ²L²)‖Δx‖²`.
pub fn forward_operator_secant_sq(gamma: f64, est: CurvatureEstimates, dx_sq: f64) -> f64 {
    (1.0 - 2.0 * gamma * est.ell + gamma * gamma * est.big_l * est.big_l) * dx_sq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::{Quadratic, SmoothFunction};
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    #[test]
    fn coincident_points_give_zero() {
        let x = [1.0, 2.0];
        assert_eq!(estimate_curvature(&x, &x, &[5.0, 5.0], &[7.0, 1.0]), CurvatureEstimates::ZERO);
    }

    #[test]
    fn hand_examples() {
        let e = estimate_curvature(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 0.0], &[2.0, 0.0]);
        assert_eq!(e, CurvatureEstimates { ell: 2.0, big_l: 2.0 });

        let f = Quadratic::diagonal(&[1.0, 4.0]);
        let grad = |x: &[f64]| {
            let mut g = vec![0.0; 2];
            f.gradient(x, &mut g).unwrap();
            g
        };
        let (xp, xc) = ([1.0, 1.0], [2.0, 1.0]);
        let e = estimate_curvature(&xp, &xc, &grad(&xp), &grad(&xc));
        assert_eq!(e, CurvatureEstimates { ell: 1.0, big_l: 1.0 });
        let xc = [1.0, 2.0];
        let e = estimate_curvature(&xp, &xc, &grad(&xp), &grad(&xc));
        assert_eq!(e, CurvatureEstimates { ell: 4.0, big_l: 4.0 });
    }

    #[test]
    fn tiny_steps_keep_curvature() {
        let e = estimate_curvature(&[0.0], &[1e-150], &[0.0], &[3e-150]);
        assert!((e.ell - 3.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_the_function_scales_estimates() {
        let xp = [0.3, -1.0];
        let xc = [1.1, 0.4];
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.5]);
        let f0 = Quadratic::new(h.clone(), vec![0.1, 0.0], 0.0).unwrap();
        let c = 7.5;
        let f1 = Quadratic::new(h * c, vec![0.1 * c, 0.0], 0.0).unwrap();
        let eval = |f: &Quadratic| {
            let (mut gp, mut gc) = (vec![0.0; 2], vec![0.0; 2]);
            f.gradient(&xp, &mut gp).unwrap();
            f.gradient(&xc, &mut gc).unwrap();
            estimate_curvature(&xp, &xc, &gp, &gc)
        };
        let (e0, e1) = (eval(&f0), eval(&f1));
        assert!((e1.ell - c * e0.ell).abs() < 1e-12 * e1.ell);
        assert!((e1.big_l - c * e0.big_l).abs() < 1e-12 * e1.big_l);
    }

    proptest! {
        #[test]
        fn bounded_by_spectral_norm(
            entries in proptest::collection::vec(-2.0f64..2.0, 9),
            xp in proptest::collection::vec(-3.0f64..3.0, 3),
            xc in proptest::collection::vec(-3.0f64..3.0, 3),
        ) {
            let m = DMatrix::from_row_slice(3, 3, &entries);
            let h = &m * m.transpose();
            let f = Quadratic::new(h, vec![0.0; 3], 0.0).unwrap();
            let l = f.lipschitz().unwrap();
            let (mut gp, mut gc) = (vec![0.0; 3], vec![0.0; 3]);
            f.gradient(&xp, &mut gp).unwrap();
            f.gradient(&xc, &mut gc).unwrap();
            let e = estimate_curvature(&xp, &xc, &gp, &gc);
            prop_assert!(curvature_order_holds(e, Some(l), Tolerance::default()));
        }
    }
}
