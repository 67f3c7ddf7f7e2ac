use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::CompositeProblem;
use crate::prox::{CubicNorm, L1Norm};
use crate::smooth::{LogisticLoss, Quadratic, SmoothFunction};

use super::LabeledDataset;

/// `0.01·‖∇f(0)‖∞` for the mean logistic loss of `ds`.
pub fn default_logistic_lambda(ds: &LabeledDataset) -> Result<f64> {
    let loss = LogisticLoss::new(ds.features.clone(), ds.labels.clone())?;
    let mut g = vec![0.0; ds.feature_count()];
    loss.gradient(&vec![0.0; ds.feature_count()], &mut g)?;
    Ok(0.01 * linalg::norm_inf(&g))
}

/// `ℓ₁`-regularized logistic regression:
/// `(1/m)Σ log(1 + exp(−yᵢaᵢᵀw)) + λ‖w‖₁`. The smooth part reports the
/// Lipschitz bound `‖A‖²/(4m)`.
pub fn build_logistic_problem(ds: &LabeledDataset, lambda: f64) -> Result<CompositeProblem> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameters(format!("lambda must be nonnegative, got {lambda}")));
    }
    let loss = LogisticLoss::new(ds.features.clone(), ds.labels.clone())?;
    Ok(CompositeProblem::new(loss, L1Norm::new(lambda)))
}

/// Cubic regularization subproblem `½xᵀHx + gᵀx + (σ/3)‖x‖³`.
pub fn build_cubic_problem(hessian: DMatrix<f64>, g_vec: Vec<f64>, sigma: f64) -> Result<CompositeProblem> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameters(format!("sigma must be positive, got {sigma}")));
    }
    let quad = Quadratic::new(hessian, g_vec, 0.0)?;
    Ok(CompositeProblem::new(quad, CubicNorm::new(sigma)))
}

/// The cubic subproblem built from the logistic loss of `ds` at `w = 0`:
/// `H = (1/4m)AᵀA` and `g = ∇f(0)`.
pub fn cubic_from_dataset(ds: &LabeledDataset, sigma: f64) -> Result<CompositeProblem> {
    let loss = LogisticLoss::new(ds.features.clone(), ds.labels.clone())?;
    let n = ds.feature_count();
    let mut g = vec![0.0; n];
    loss.gradient(&vec![0.0; n], &mut g)?;
    build_cubic_problem(loss.hessian_at_zero(), g, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::parse_libsvm;
    use crate::solvers::{run_adapg, StoppingRule};
    use crate::stepsize::FixedParams;

    #[test]
    fn logistic_builder() {
        let ds = parse_libsvm(b"1 1:1\n-1 1:-2 2:0.5\n1 2:3").unwrap();
        let p = build_logistic_problem(&ds, 0.1).unwrap();
        let v = p.evaluate_objective(&[0.0, 0.0]).unwrap().finite().unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-15);
        let l = p.smooth().lipschitz().unwrap();
        let a = ds.features.to_dense();
        let norm_sq = a.singular_values().max().powi(2);
        assert!((l - norm_sq / 12.0).abs() < 1e-10);

        let bad = parse_libsvm(b"2 1:1").unwrap();
        assert!(build_logistic_problem(&bad, 0.1).is_err());
        assert!(build_logistic_problem(&ds, -1.0).is_err());
        assert!(default_logistic_lambda(&ds).unwrap() > 0.0);
    }

    #[test]
    fn cubic_identity_minimizer_is_zero() {
        let p = build_cubic_problem(DMatrix::identity(3, 3), vec![0.0; 3], 2.0).unwrap();
        let sol = run_adapg(&p, &[1.0, -1.0, 2.0], 1.0, FixedParams::default(), StoppingRule::new(1000, 1e-12)).unwrap();
        assert!(linalg::norm(&sol.x) < 1e-10);
    }

    #[test]
    fn cubic_one_dimensional_matches_grid() {
        let p = build_cubic_problem(DMatrix::from_element(1, 1, 1.0), vec![-2.0], 3.0).unwrap();
        let sol = run_adapg(&p, &[0.0], 1.0, FixedParams::default(), StoppingRule::new(10_000, 1e-12)).unwrap();
        let phi = |x: f64| 0.5 * x * x - 2.0 * x + x.abs().powi(3);
        let (mut best, mut arg) = (f64::INFINITY, 0.0);
        for i in 0..=4_000_000 {
            let x = -2.0 + i as f64 * 1e-6;
            if phi(x) < best {
                best = phi(x);
                arg = x;
            }
        }
        assert!((sol.x[0] - arg).abs() < 1e-6, "{} vs {arg}", sol.x[0]);
        // stationarity x + 3x|x| = 2 on the positive branch
        assert!((sol.x[0] + 3.0 * sol.x[0] * sol.x[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn hessian_at_zero_matches_second_differences() {
        let ds = parse_libsvm(b"1 1:1 2:-0.5\n-1 1:0.3 2:2\n1 1:-1 3:0.7\n-1 2:1 3:1").unwrap();
        let loss = LogisticLoss::new(ds.features.clone(), ds.labels.clone()).unwrap();
        let h = loss.hessian_at_zero();
        let eps = 1e-5;
        for j in 0..3 {
            let mut e = vec![0.0; 3];
            e[j] = eps;
            let minus: Vec<f64> = e.iter().map(|v| -v).collect();
            let (mut gp, mut gm) = (vec![0.0; 3], vec![0.0; 3]);
            loss.gradient(&e, &mut gp).unwrap();
            loss.gradient(&minus, &mut gm).unwrap();
            for i in 0..3 {
                let fd = (gp[i] - gm[i]) / (2.0 * eps);
                assert!((fd - h[(i, j)]).abs() < 1e-8, "({i}, {j})");
            }
        }
    }

    #[test]
    fn cubic_rejects_bad_input() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(build_cubic_problem(asym, vec![0.0; 2], 1.0).is_err());
        assert!(build_cubic_problem(DMatrix::identity(2, 2), vec![0.0; 2], 0.0).is_err());
    }
}
