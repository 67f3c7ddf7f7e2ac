use std::time::Instant;

use crate::curvature::CurvatureEstimates;
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::CompositeProblem;
use crate::trace::{IterationRecord, SolverKind, StopReason, Trace};

use super::StoppingRule;

/// Everything a driver knows about the iterate it just produced.
pub(crate) struct Entry<'a> {
    pub k: usize,
    pub gamma: f64,
    pub rho: f64,
    pub schedule: Option<(f64, f64)>,
    pub x: &'a [f64],
    pub x_prev: &'a [f64],
    /// `∇f(x)`
    pub grad: &'a [f64],
    pub est: CurvatureEstimates,
    /// Stepsize used for the residual evaluation.
    pub residual_gamma: f64,
}

/// Accumulates trace records, oracle counters and the stopping decision.
pub(crate) struct Recorder<'p> {
    problem: &'p CompositeProblem,
    stop: StoppingRule,
    start: Instant,
    pub grads: u64,
    pub proxes: u64,
    pub funcs: u64,
    records: Vec<IterationRecord>,
}

impl<'p> Recorder<'p> {
    pub fn new(problem: &'p CompositeProblem, stop: StoppingRule) -> Self {
        Self { problem, stop, start: Instant::now(), grads: 0, proxes: 0, funcs: 0, records: Vec::new() }
    }

    pub fn push(&mut self, e: Entry<'_>) -> Result<Option<StopReason>> {
        if !linalg::all_finite(e.x) {
            return Err(Error::NonFiniteIterate { iteration: e.k });
        }
        let objective = self.problem.evaluate_objective(e.x)?;
        let residual = self.problem.fixed_point_residual(e.x, e.grad, e.residual_gamma).map_err(Error::at(e.k))?;
        self.records.push(IterationRecord {
            k: e.k,
            gamma: e.gamma,
            rho: e.rho,
            pi: e.schedule.map(|s| s.0),
            xi: e.schedule.map(|s| s.1),
            objective,
            step_norm: linalg::dist(e.x, e.x_prev),
            residual,
            ell: e.est.ell,
            big_l: e.est.big_l,
            grad_evals: self.grads,
            prox_evals: self.proxes,
            func_evals: self.funcs,
            wall_time: self.start.elapsed().as_secs_f64(),
            iterate: self.stop.keep_iterates.then(|| e.x.to_vec()),
            lyapunov: None,
        });
        if residual <= self.stop.tol {
            return Ok(Some(StopReason::Tolerance));
        }
        if let (Some(target), Some(v)) = (self.stop.target_objective, objective.finite()) {
            if v <= target {
                return Ok(Some(StopReason::TargetObjective));
            }
        }
        if self.records.len() >= self.stop.max_iters {
            return Ok(Some(StopReason::MaxIterations));
        }
        Ok(None)
    }

    pub fn finish(self, solver: SolverKind, x_init: &[f64], stop_reason: StopReason) -> Trace {
        Trace { solver, x_init: x_init.to_vec(), records: self.records, stop_reason }
    }
}

pub(crate) fn check_start(problem: &CompositeProblem, x_init: &[f64], gamma0: f64, stop: &StoppingRule) -> Result<()> {
    if x_init.len() != problem.dimension() {
        return Err(Error::DimensionMismatch { expected: problem.dimension(), got: x_init.len() });
    }
    if !(gamma0 > 0.0) || !gamma0.is_finite() {
        return Err(Error::NonPositiveStepsize(gamma0));
    }
    stop.validate()
}

pub(crate) fn check_stepsize(gamma: f64) -> Result<f64> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(gamma)
    } else {
        Err(Error::NonPositiveStepsize(gamma))
    }
}
