use crate::curvature::{estimate_curvature, CurvatureEstimates};
use crate::error::{Error, Result};
use crate::problem::{CompositeProblem, Point};
use crate::stepsize::{adapg_stepsize, general_stepsize, FixedParams, ScheduleParams, StepsizePair};
use crate::trace::{Solution, SolverKind, StopReason};

use super::record::{check_start, check_stepsize, Entry, Recorder};
use super::StoppingRule;

/// State handed to a [`Schedule`] when it picks `(πₖ₊₁, ξₖ₊₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleContext {
    pub k: usize,
    pub gamma: f64,
    pub ell: f64,
    pub big_l: f64,
    pub pi: f64,
    pub xi: f64,
}

/// Chooses the parameters of the time-varying rule.
pub trait Schedule {
    /// Bounds and `(π₀, ξ₀)`.
    fn initial(&self) -> ScheduleParams;

    /// `(πₖ₊₁, ξₖ₊₁)`. Inadmissible choices abort the run.
    fn next(&mut self, ctx: &ScheduleContext) -> (f64, f64);
}

/// `π ≡ q`, `ξ ≡ q/r − 1`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantSchedule(pub FixedParams);

impl Schedule for ConstantSchedule {
    fn initial(&self) -> ScheduleParams {
        self.0.schedule()
    }

    fn next(&mut self, ctx: &ScheduleContext) -> (f64, f64) {
        (ctx.pi, ctx.xi)
    }
}

/// Alternates `π` between `low` and `high`, moving up only when the gate
/// `γₖℓₖ ≥ 1` is open; `ξ` stays fixed.
#[derive(Debug, Clone, Copy)]
pub struct GatedAlternating {
    pub low: f64,
    pub high: f64,
    pub xi: f64,
}

impl Default for GatedAlternating {
    fn default() -> Self {
        Self { low: 1.0, high: 1.5, xi: 1.0 }
    }
}

impl Schedule for GatedAlternating {
    fn initial(&self) -> ScheduleParams {
        ScheduleParams { pi_min: self.low, pi_max: self.high, xi_min: self.xi, pi: self.low, xi: self.xi }
    }

    fn next(&mut self, ctx: &ScheduleContext) -> (f64, f64) {
        let pi = if ctx.pi < self.high && ctx.gamma * ctx.ell >= 1.0 { self.high } else { self.low };
        (pi, self.xi)
    }
}

/// Update of the original adaptive proximal gradient method:
/// `γₖ·min{√(1 + ρₖ), 1/(2√[γₖ²Lₖ² − γₖℓₖ]₊)}`.
pub fn adapg_original_stepsize(sp: &StepsizePair, est: CurvatureEstimates) -> f64 {
    let growth = (1.0 + sp.rho).sqrt();
    let g = sp.gamma_curr;
    let gl = g * est.big_l;
    let bracket = (gl * gl - g * est.ell).max(0.0);
    let curvature = if bracket > 0.0 { 1.0 / (2.0 * bracket.sqrt()) } else { f64::INFINITY };
    g * growth.min(curvature)
}

/// Update of the Malitsky–Mishchenko method: `min{γₖ√(1 + ρₖ), 1/(√2 Lₖ)}`.
pub fn adapg_mm_stepsize(sp: &StepsizePair, est: CurvatureEstimates) -> f64 {
    let growth = sp.gamma_curr * (1.0 + sp.rho).sqrt();
    let curvature =
        if est.big_l > 0.0 { 1.0 / (std::f64::consts::SQRT_2 * est.big_l) } else { f64::INFINITY };
    growth.min(curvature)
}

enum Rule<'s> {
    Fixed(FixedParams),
    General { schedule: &'s mut dyn Schedule, current: ScheduleParams },
    Original,
    Mm,
}

impl Rule<'_> {
    fn params(&self) -> (f64, f64) {
        match self {
            Rule::Fixed(p) => (p.q, p.xi()),
            Rule::General { current, .. } => (current.pi, current.xi),
            Rule::Original | Rule::Mm => (1.0, 1.0),
        }
    }

    fn kind(&self) -> SolverKind {
        match self {
            Rule::Fixed(p) => SolverKind::AdaPg { q: p.q, r: p.r },
            Rule::General { .. } => SolverKind::General,
            Rule::Original => SolverKind::AdaPgOriginal,
            Rule::Mm => SolverKind::AdaPgMm,
        }
    }

    fn step(&mut self, k: usize, sp: &StepsizePair, est: CurvatureEstimates) -> Result<f64> {
        match self {
            Rule::Fixed(p) => Ok(adapg_stepsize(sp, est, p)),
            Rule::Original => Ok(adapg_original_stepsize(sp, est)),
            Rule::Mm => Ok(adapg_mm_stepsize(sp, est)),
            Rule::General { schedule, current } => {
                let ctx = ScheduleContext {
                    k,
                    gamma: sp.gamma_curr,
                    ell: est.ell,
                    big_l: est.big_l,
                    pi: current.pi,
                    xi: current.xi,
                };
                let (pi, xi) = schedule.next(&ctx);
                let next = current.with(pi, xi);
                let gamma = general_stepsize(sp, est, current, &next)
                    .map_err(|violations| Error::ScheduleViolation { iteration: k, violations })?;
                *current = next;
                Ok(gamma)
            }
        }
    }
}

fn drive(
    problem: &CompositeProblem,
    x_init: &[f64],
    gamma0: f64,
    mut rule: Rule<'_>,
    stop: StoppingRule,
) -> Result<Solution> {
    check_start(problem, x_init, gamma0, &stop)?;
    let kind = rule.kind();
    let mut rec = Recorder::new(problem, stop);

    let grad_init = problem.gradient(x_init).map_err(Error::at(0))?;
    rec.grads += 1;
    let mut x: Point = problem.forward_backward(x_init, &grad_init, gamma0).map_err(Error::at(0))?;
    rec.proxes += 1;
    let mut grad = problem.gradient(&x).map_err(Error::at(0))?;
    rec.grads += 1;
    let mut est = estimate_curvature(x_init, &x, &grad_init, &grad);
    let mut sp = StepsizePair::initial(gamma0);

    let entry = Entry {
        k: 0,
        gamma: gamma0,
        rho: sp.rho,
        schedule: Some(rule.params()),
        x: &x,
        x_prev: x_init,
        grad: &grad,
        est,
        residual_gamma: gamma0,
    };
    let mut reason = rec.push(entry)?;

    let mut k = 0;
    while reason.is_none() {
        let gamma = check_stepsize(rule.step(k, &sp, est)?)?;
        let x_next = problem.forward_backward(&x, &grad, gamma).map_err(Error::at(k + 1))?;
        rec.proxes += 1;
        let grad_next = problem.gradient(&x_next).map_err(Error::at(k + 1))?;
        rec.grads += 1;
        est = estimate_curvature(&x, &x_next, &grad, &grad_next);
        sp = sp.advance(gamma);
        k += 1;
        let entry = Entry {
            k,
            gamma,
            rho: sp.rho,
            schedule: Some(rule.params()),
            x: &x_next,
            x_prev: &x,
            grad: &grad_next,
            est,
            residual_gamma: gamma,
        };
        reason = rec.push(entry)?;
        x = x_next;
        grad = grad_next;
    }

    let trace = rec.finish(kind, x_init, reason.unwrap_or(StopReason::MaxIterations));
    Ok(Solution { x, trace })
}

/// Adaptive proximal gradient method with constant parameters `(q, r)`.
///
/// Starts from `x⁻¹ = x_init` with `γ₀ = γ₋₁`, takes the initialization
/// step `x⁰ = prox_{γ₀g}(x⁻¹ − γ₀∇f(x⁻¹))`, then alternates the stepsize
/// update with a proximal gradient step. One gradient and one prox
/// evaluation per iteration.
pub fn run_adapg(
    problem: &CompositeProblem,
    x_init: &[f64],
    gamma0: f64,
    params: FixedParams,
    stop: StoppingRule,
) -> Result<Solution> {
    let params = FixedParams::new(params.q, params.r)?;
    drive(problem, x_init, gamma0, Rule::Fixed(params), stop)
}

/// The general framework with parameters chosen per step by `schedule`.
/// Fails with [`Error::ScheduleViolation`] at the first inadmissible choice.
pub fn run_general(
    problem: &CompositeProblem,
    x_init: &[f64],
    gamma0: f64,
    schedule: &mut dyn Schedule,
    stop: StoppingRule,
) -> Result<Solution> {
    let current = schedule.initial();
    current.validate().map_err(|violations| Error::ScheduleViolation { iteration: 0, violations })?;
    drive(problem, x_init, gamma0, Rule::General { schedule, current }, stop)
}

/// Baseline: the original adaptive update, see [`adapg_original_stepsize`].
pub fn run_adapg_baseline(
    problem: &CompositeProblem,
    x_init: &[f64],
    gamma0: f64,
    stop: StoppingRule,
) -> Result<Solution> {
    drive(problem, x_init, gamma0, Rule::Original, stop)
}

/// Baseline: proximal extension of the Malitsky–Mishchenko update, see
/// [`adapg_mm_stepsize`].
pub fn run_adapg_mm(problem: &CompositeProblem, x_init: &[f64], gamma0: f64, stop: StoppingRule) -> Result<Solution> {
    drive(problem, x_init, gamma0, Rule::Mm, stop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox::{L1Norm, Zero};
    use crate::smooth::{Quadratic, ZeroSmooth};
    use crate::stepsize::Violation;

    fn scalar_quadratic(l: f64) -> CompositeProblem {
        CompositeProblem::new(Quadratic::diagonal(&[l]), Zero)
    }

    #[test]
    fn scalar_quadratic_reaches_bound() {
        let p = scalar_quadratic(1.0);
        let params = FixedParams::new(1.0, 0.5).unwrap();
        let sol = run_adapg(&p, &[5.0], 1.0, params, StoppingRule::new(10_000, 1e-9)).unwrap();
        assert!(sol.x[0].abs() <= 1e-8);
        for r in &sol.trace.records {
            assert!(r.gamma >= 0.5f64.sqrt() - 1e-12, "k = {}: {}", r.k, r.gamma);
        }
    }

    #[test]
    fn pure_prox_problem_settles_after_initialization() {
        let p = CompositeProblem::new(ZeroSmooth { dim: 3 }, L1Norm::new(1.0));
        let x_init = [0.5, -2.0, 0.9];
        let sol = run_adapg(&p, &x_init, 1.0, FixedParams::default(), StoppingRule::iterations(4).keeping_iterates())
            .unwrap();
        let recs = &sol.trace.records;
        assert_eq!(recs[0].iterate.as_deref(), Some(&[0.0, -1.0, 0.0][..]));
        assert_eq!(sol.x, vec![0.0, 0.0, 0.0]);

        let small = [0.5, -0.7];
        let p = CompositeProblem::new(ZeroSmooth { dim: 2 }, L1Norm::new(1.0));
        let sol = run_adapg(&p, &small, 1.0, FixedParams::default(), StoppingRule::iterations(3)).unwrap();
        assert_eq!(sol.x, vec![0.0, 0.0]);
        assert_eq!(sol.trace.stop_reason, StopReason::Tolerance);
    }

    #[test]
    fn one_gradient_per_iteration() {
        let p = CompositeProblem::new(Quadratic::diagonal(&[1.0, 3.0, 10.0]), L1Norm::new(0.1));
        let sol = run_adapg(&p, &[1.0, 1.0, 1.0], 1.0, FixedParams::default(), StoppingRule::iterations(50)).unwrap();
        for w in sol.trace.records.windows(2) {
            assert_eq!(w[1].grad_evals - w[0].grad_evals, 1);
            assert_eq!(w[1].prox_evals - w[0].prox_evals, 1);
        }
        assert_eq!(sol.trace.records[0].grad_evals, 2);
    }

    #[test]
    fn growth_gate_violation_is_reported() {
        struct Greedy;
        impl Schedule for Greedy {
            fn initial(&self) -> ScheduleParams {
                ScheduleParams { pi_min: 1.0, pi_max: 2.0, xi_min: 1.0, pi: 1.0, xi: 1.0 }
            }
            fn next(&mut self, _: &ScheduleContext) -> (f64, f64) {
                (2.0, 1.0)
            }
        }
        // γ₀ℓ₀ = 0.1 < 1 on the first update
        let p = scalar_quadratic(1.0);
        let err = run_general(&p, &[1.0], 0.1, &mut Greedy, StoppingRule::iterations(10)).unwrap_err();
        match &err {
            Error::ScheduleViolation { iteration, violations } => {
                assert_eq!(*iteration, 0);
                assert_eq!(violations, &vec![Violation::PiGrowthGate]);
            }
            other => panic!("unexpected {other}"),
        }
        assert!(err.to_string().contains("pi growth gate"));
    }

    #[test]
    fn baseline_updates() {
        let sp = StepsizePair::initial(1.0);
        // ℓ = L, γL ≤ 1: growth governs
        let e = CurvatureEstimates { ell: 0.8, big_l: 0.8 };
        assert_eq!(adapg_original_stepsize(&sp, e), 2f64.sqrt());
        assert_eq!(adapg_mm_stepsize(&sp, CurvatureEstimates::ZERO), 2f64.sqrt());

        let p = scalar_quadratic(4.0);
        let sol = run_adapg_mm(&p, &[1.0], 1.0, StoppingRule::iterations(200)).unwrap();
        let last = sol.trace.last().gamma;
        assert!((last - 1.0 / (2f64.sqrt() * 4.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = scalar_quadratic(1.0);
        let stop = StoppingRule::iterations(5);
        assert!(matches!(run_adapg(&p, &[1.0], 0.0, FixedParams::default(), stop), Err(Error::NonPositiveStepsize(_))));
        assert!(matches!(
            run_adapg(&p, &[1.0, 2.0], 1.0, FixedParams::default(), stop),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            run_adapg(&p, &[1.0], 1.0, FixedParams { q: 1.0, r: 1.0 }, stop),
            Err(Error::InvalidParameters(_))
        ));
    }
}
