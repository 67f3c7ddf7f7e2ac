use crate::curvature::estimate_curvature;
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{CompositeProblem, Point};
use crate::trace::{Solution, SolverKind, StopReason};

use super::record::{check_start, Entry, Recorder};
use super::StoppingRule;

/// Smallest trial stepsize before a run is abandoned.
pub const BACKTRACKING_FLOOR: f64 = 1e-300;

/// Relative slack in the acceptance test, on the scale of `|f|`.
const ROUNDOFF: f64 = 8.0 * f64::EPSILON;

/// Parameters of the backtracking baseline.
///
/// A trial `x⁺ = prox_{γg}(x − γ∇f(x))` is accepted when
/// `f(x⁺) ≤ f(x) + ⟨∇f(x), x⁺ − x⟩ + (decrease/2γ)‖x⁺ − x‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacktrackingConfig {
    /// Warm-start factor: each iteration first tries `b·γₖ`.
    pub b: f64,
    /// Multiplier applied to `γ` after a rejected trial.
    pub shrink: f64,
    /// Weight of the quadratic term in the acceptance test.
    pub decrease: f64,
}

impl BacktrackingConfig {
    pub fn new(b: f64) -> Self {
        Self { b, shrink: 0.5, decrease: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.b >= 1.0 && self.b.is_finite()) {
            return Err(Error::InvalidParameters(format!("backtracking requires b >= 1, got {}", self.b)));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidParameters(format!("shrink factor must lie in (0, 1), got {}", self.shrink)));
        }
        if !(self.decrease > 0.0 && self.decrease <= 1.0) {
            return Err(Error::InvalidParameters(format!("decrease weight must lie in (0, 1], got {}", self.decrease)));
        }
        Ok(())
    }
}

struct Accepted {
    gamma: f64,
    x: Point,
    f_value: f64,
}

fn backtrack(
    problem: &CompositeProblem,
    rec: &mut Recorder<'_>,
    cfg: &BacktrackingConfig,
    x: &[f64],
    f_x: f64,
    grad: &[f64],
    mut gamma: f64,
    iteration: usize,
) -> Result<Accepted> {
    loop {
        if gamma < BACKTRACKING_FLOOR {
            return Err(Error::BacktrackingCollapse { iteration });
        }
        let candidate = problem.forward_backward(x, grad, gamma).map_err(Error::at(iteration))?;
        rec.proxes += 1;
        let f_candidate = problem.smooth().value(&candidate);
        rec.funcs += 1;
        let d = linalg::sub(&candidate, x);
        let model = f_x + linalg::dot(grad, &d) + cfg.decrease * linalg::norm_sq(&d) / (2.0 * gamma);
        let roundoff = ROUNDOFF * f_x.abs().max(f_candidate.abs());
        if f_candidate <= model + roundoff {
            return Ok(Accepted { gamma, x: candidate, f_value: f_candidate });
        }
        gamma *= cfg.shrink;
    }
}

/// Proximal gradient with nonmonotone backtracking: every iteration starts
/// from `b·γₖ` and halves until the quadratic upper bound holds.
pub fn run_pg_backtracking(
    problem: &CompositeProblem,
    x_init: &[f64],
    gamma0: f64,
    b: f64,
    stop: StoppingRule,
) -> Result<Solution> {
    run_pg_backtracking_with(problem, x_init, gamma0, &BacktrackingConfig::new(b), stop)
}

pub fn run_pg_backtracking_with(
    problem: &CompositeProblem,
    x_init: &[f64],
    gamma0: f64,
    cfg: &BacktrackingConfig,
    stop: StoppingRule,
) -> Result<Solution> {
    check_start(problem, x_init, gamma0, &stop)?;
    cfg.validate()?;
    let mut rec = Recorder::new(problem, stop);

    let grad_init = problem.gradient(x_init).map_err(Error::at(0))?;
    rec.grads += 1;
    let f_init = problem.smooth().value(x_init);
    rec.funcs += 1;
    let acc = backtrack(problem, &mut rec, cfg, x_init, f_init, &grad_init, gamma0, 0)?;
    let mut grad = problem.gradient(&acc.x).map_err(Error::at(0))?;
    rec.grads += 1;
    let est = estimate_curvature(x_init, &acc.x, &grad_init, &grad);
    let mut gamma = acc.gamma;
    let mut f_x = acc.f_value;
    let mut x = acc.x;
    let entry = Entry {
        k: 0,
        gamma,
        rho: gamma / gamma0,
        schedule: None,
        x: &x,
        x_prev: x_init,
        grad: &grad,
        est,
        residual_gamma: gamma,
    };
    let mut reason = rec.push(entry)?;

    let mut k = 0;
    while reason.is_none() {
        k += 1;
        let acc = backtrack(problem, &mut rec, cfg, &x, f_x, &grad, cfg.b * gamma, k)?;
        let grad_next = problem.gradient(&acc.x).map_err(Error::at(k))?;
        rec.grads += 1;
        let est = estimate_curvature(&x, &acc.x, &grad, &grad_next);
        let entry = Entry {
            k,
            gamma: acc.gamma,
            rho: acc.gamma / gamma,
            schedule: None,
            x: &acc.x,
            x_prev: &x,
            grad: &grad_next,
            est,
            residual_gamma: acc.gamma,
        };
        reason = rec.push(entry)?;
        gamma = acc.gamma;
        f_x = acc.f_value;
        x = acc.x;
        grad = grad_next;
    }

    let trace = rec.finish(SolverKind::Backtracking { b: cfg.b }, x_init, reason.unwrap_or(StopReason::MaxIterations));
    Ok(Solution { x, trace })
}
