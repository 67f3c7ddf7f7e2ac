use crate::curvature::estimate_curvature;
use crate::error::{Error, Result};
use crate::problem::{CompositeProblem, Point};
use crate::trace::{Solution, SolverKind};

use super::record::{check_start, Entry, Recorder};
use super::StoppingRule;

/// `tₖ₊₁ = (1 + √(1 + 4tₖ²))/2`
pub fn nesterov_momentum(t: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
}

/// Accelerated proximal gradient with constant stepsize `1/L_f`.
///
/// Record `k` holds `xᵏ = prox_{g/L}(yᵏ − ∇f(yᵏ)/L)` with `y⁰ = x_init`
/// and `yᵏ⁺¹ = xᵏ + ((tₖ − 1)/tₖ₊₁)(xᵏ − xᵏ⁻¹)`, `t₀ = 1`. The residual
/// and curvature columns are evaluated at the `xᵏ` sequence; those extra
/// gradients are not counted as oracle calls.
pub fn run_nesterov(problem: &CompositeProblem, x_init: &[f64], lipschitz: f64, stop: StoppingRule) -> Result<Solution> {
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return Err(Error::InvalidParameters(format!("Lipschitz constant must be positive, got {lipschitz}")));
    }
    let gamma = 1.0 / lipschitz;
    check_start(problem, x_init, gamma, &stop)?;
    let mut rec = Recorder::new(problem, stop);

    let mut x_prev: Point = x_init.to_vec();
    let mut grad_x_prev = problem.gradient(x_init).map_err(Error::at(0))?;
    let mut y: Point = x_init.to_vec();
    let mut t = 1.0;
    let mut k = 0;
    let mut x;
    loop {
        let grad_y = if k == 0 { grad_x_prev.clone() } else { problem.gradient(&y).map_err(Error::at(k))? };
        rec.grads += 1;
        x = problem.forward_backward(&y, &grad_y, gamma).map_err(Error::at(k))?;
        rec.proxes += 1;
        let grad_x = problem.gradient(&x).map_err(Error::at(k))?;
        let est = estimate_curvature(&x_prev, &x, &grad_x_prev, &grad_x);
        let entry = Entry {
            k,
            gamma,
            rho: 1.0,
            schedule: None,
            x: &x,
            x_prev: &x_prev,
            grad: &grad_x,
            est,
            residual_gamma: gamma,
        };
        let reason = rec.push(entry)?;
        if let Some(reason) = reason {
            let trace = rec.finish(SolverKind::Nesterov { lipschitz }, x_init, reason);
            return Ok(Solution { x, trace });
        }
        let t_next = nesterov_momentum(t);
        let beta = (t - 1.0) / t_next;
        y = x.iter().zip(&x_prev).map(|(a, b)| a + beta * (a - b)).collect();
        t = t_next;
        x_prev = x;
        grad_x_prev = grad_x;
        k += 1;
    }
}
