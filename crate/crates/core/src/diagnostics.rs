//! Certificates evaluated along recorded traces.
//!
//! Index conventions follow [`Trace`]: record `j` holds `xʲ`, `γⱼ` and the
//! curvature `(ℓⱼ, Lⱼ)` between `xʲ⁻¹` and `xʲ`, with `x⁻¹ = x_init`.
//! The stepsize `γⱼ` was computed from `(γⱼ₋₁, ρⱼ₋₁, ℓⱼ₋₁, Lⱼ₋₁)`.
//!
//! | check             | condition at record `j`                                                |
//! |-------------------|------------------------------------------------------------------------|
//! | `fne`             | `‖xʲ−xʲ⁻¹‖² ≤ ρⱼ⟨H(xʲ⁻²)−H(xʲ⁻¹), xʲ⁻¹−xʲ⟩ ≤ ρⱼ²‖H(xʲ⁻²)−H(xʲ⁻¹)‖²`, `H = id − γⱼ₋₁∇f` |
//! | `lyapunov`        | `Uⱼ ≤ Uⱼ₋₁` for `j ≥ 2`                                                 |
//! | `curvature_order` | `0 ≤ ℓⱼ ≤ Lⱼ ≤ L_ref`                                                   |
//! | `stepsize_cap`    | `ρⱼ² ≤ min{(1+πⱼ₋₁ρⱼ₋₁)/πⱼ, ξⱼ₋₁/((1+ξⱼ)[…]₊)}`                           |
//! | `lemma25`         | `γⱼ ≥ min{γⱼ₋₁√(1/π_max + ρⱼ₋₁), √(ξ_min r_min/π_max)/Lⱼ₋₁}` if `γⱼ₋₁ℓⱼ₋₁ < 1` |
//! | `rate`            | `min_{k≤K} Pₖ ≤ U₁/Σ_{k=1}^{K+1} γₖ` at index `K`                           |
//!
//! Secant estimates taken across a step shorter than `√ε·max{1, ‖xʲ‖}` are
//! dominated by rounding in the gradient difference; `curvature_order`,
//! `stepsize_cap` and `lemma25` skip such records instead of flagging
//! them.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_order_holds, CurvatureEstimates, Tolerance};
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::CompositeProblem;
use crate::stepsize::{lower_bound_threshold, one_step_lower_bound, rho_sq_cap, stepsize_lower_bound, ScheduleParams, StepsizePair};
use crate::trace::{SolverKind, Trace};

/// Ingredients of `Uₖ(x) = ½‖xᵏ−x‖² + γₖ(1+πₖρₖ)Pₖ₋₁(x) + (ξₖ/2)‖xᵏ−xᵏ⁻¹‖²`.
#[derive(Debug, Clone, Copy)]
pub struct LyapunovInput<'a> {
    pub x: &'a [f64],
    pub x_prev: &'a [f64],
    /// `Pₖ₋₁(x) = φ(xᵏ⁻¹) − φ(x)`
    pub gap_prev: f64,
    pub gamma: f64,
    pub pi: f64,
    pub rho: f64,
    pub xi: f64,
}

pub fn lyapunov(input: &LyapunovInput<'_>, x_ref: &[f64]) -> Result<f64> {
    if !input.gap_prev.is_finite() {
        return Err(Error::Missing("finite objective value for the previous iterate".into()));
    }
    if input.x.len() != x_ref.len() || input.x_prev.len() != x_ref.len() {
        return Err(Error::DimensionMismatch { expected: x_ref.len(), got: input.x.len() });
    }
    Ok(0.5 * linalg::dist_sq(input.x, x_ref)
        + input.gamma * (1.0 + input.pi * input.rho) * input.gap_prev
        + 0.5 * input.xi * linalg::dist_sq(input.x, input.x_prev))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    pub tol: Tolerance,
    /// Reference Lipschitz modulus for the `L ≤ L_ref` part of the
    /// curvature check.
    pub lipschitz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckStatus {
    AllPass,
    Failed { first: usize, count: usize },
    NotApplicable { reason: String },
    ReferenceInsufficient,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AllPass => f.write_str("all pass"),
            Self::Failed { first, count } => write!(f, "FAIL at k={first} ({count} total)"),
            Self::NotApplicable { reason } => write!(f, "n/a ({reason})"),
            Self::ReferenceInsufficient => f.write_str("reference insufficient"),
        }
    }
}

/// Per-record outcome of one certificate family. `None` where the check
/// has no premise or does not apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub flags: Vec<Option<bool>>,
    pub status: CheckStatus,
}

impl Check {
    fn not_applicable(len: usize, reason: &str) -> Self {
        Self { flags: vec![None; len], status: CheckStatus::NotApplicable { reason: reason.into() } }
    }

    fn from_flags(flags: Vec<Option<bool>>) -> Self {
        let mut failed = flags.iter().enumerate().filter(|(_, f)| **f == Some(false)).map(|(k, _)| k);
        let status = match failed.next() {
            Some(first) => CheckStatus::Failed { first, count: 1 + failed.count() },
            None => CheckStatus::AllPass,
        };
        Self { flags, status }
    }

    pub fn passed(&self) -> bool {
        !matches!(self.status, CheckStatus::Failed { .. } | CheckStatus::ReferenceInsufficient)
    }

    pub fn first_failure(&self) -> Option<usize> {
        match self.status {
            CheckStatus::Failed { first, .. } => Some(first),
            _ => None,
        }
    }

    pub fn checked(&self) -> usize {
        self.flags.iter().filter(|f| f.is_some()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub solver: SolverKind,
    pub len: usize,
    pub params: CheckParams,
    pub reference_objective: Option<f64>,
    /// `Uⱼ(x_ref)` per record, where computable.
    pub lyapunov_values: Vec<Option<f64>>,
    pub fne: Check,
    pub lyapunov: Check,
    pub curvature_order: Check,
    pub stepsize_cap: Check,
    pub lemma25: Check,
    pub rate: Check,
}

impl CertificateReport {
    pub fn checks(&self) -> [(&'static str, &Check); 6] {
        [
            ("fne", &self.fne),
            ("lyapunov", &self.lyapunov),
            ("curvature_order", &self.curvature_order),
            ("stepsize_cap", &self.stepsize_cap),
            ("lemma25", &self.lemma25),
            ("rate", &self.rate),
        ]
    }

    /// No applicable check failed and the reference was sufficient.
    pub fn all_pass(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.passed())
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<16} {:>8}  status", "check", "checked");
        for (name, c) in self.checks() {
            let _ = writeln!(out, "{:<16} {:>8}  {}", name, c.checked(), c.status);
        }
        out
    }
}

struct Lemma25Bounds {
    pi_max: f64,
    xi_min: f64,
}

fn schedules(trace: &Trace) -> Option<Vec<ScheduleParams>> {
    trace
        .records
        .iter()
        .map(|r| {
            let (pi, xi) = (r.pi?, r.xi?);
            Some(ScheduleParams { pi_min: pi, pi_max: pi, xi_min: xi, pi, xi })
        })
        .collect()
}

/// `ρⱼ` recomputed from the stepsizes, keeping the recorded `ρ₀`.
fn ratios(trace: &Trace) -> Vec<f64> {
    let mut out = Vec::with_capacity(trace.len());
    for (j, r) in trace.records.iter().enumerate() {
        out.push(if j == 0 { r.rho } else { r.gamma / trace.records[j - 1].gamma });
    }
    out
}

fn resolvable(trace: &Trace, j: usize) -> bool {
    let r = &trace.records[j];
    let size = r.iterate.as_deref().map_or(1.0, |x| linalg::norm(x).max(1.0));
    r.step_norm > f64::EPSILON.sqrt() * size
}

fn est(trace: &Trace, j: usize) -> CurvatureEstimates {
    let r = &trace.records[j];
    CurvatureEstimates { ell: r.ell, big_l: r.big_l }
}

pub fn check_trace(
    trace: &Trace,
    problem: &CompositeProblem,
    x_ref: Option<&[f64]>,
    params: &CheckParams,
) -> Result<CertificateReport> {
    let n = trace.len();
    let tol = params.tol;
    let rho = ratios(trace);
    let sched = if trace.solver.is_adaptive() { schedules(trace) } else { None };

    let curvature_order = Check::from_flags(
        (0..n)
            .map(|j| resolvable(trace, j).then(|| curvature_order_holds(est(trace, j), params.lipschitz, tol)))
            .collect(),
    );

    let iterates: Option<Vec<&[f64]>> = trace.records.iter().map(|r| r.iterate.as_deref()).collect();
    let point = |its: &Vec<&'_ [f64]>, j: isize| -> Vec<f64> {
        if j < 0 {
            trace.x_init.clone()
        } else {
            its[j as usize].to_vec()
        }
    };

    let fne = match (&iterates, trace.solver.is_proximal_gradient()) {
        (_, false) => Check::not_applicable(n, "not a proximal gradient method"),
        (None, _) => Check::not_applicable(n, "trace has no iterates"),
        (Some(its), true) => {
            let mut flags = vec![None; n];
            let mut grad_prev = problem.gradient(&trace.x_init)?;
            let mut grad_curr = problem.gradient(its[0])?;
            for j in 1..n {
                let x2 = point(its, j as isize - 2);
                let x1 = its[j - 1];
                let x0 = its[j];
                let gamma = trace.records[j - 1].gamma;
                // H(xʲ⁻²) − H(xʲ⁻¹)
                let mut dh = linalg::sub(&x2, x1);
                linalg::axpy(-gamma, &linalg::sub(&grad_prev, &grad_curr), &mut dh);
                let step = linalg::sub(x1, x0);
                let lhs = linalg::norm_sq(&step);
                let mid = rho[j] * linalg::dot(&dh, &step);
                let rhs = rho[j] * rho[j] * linalg::norm_sq(&dh);
                let scale = lhs.max(rhs);
                flags[j] = Some(tol.le(lhs, mid, scale) && tol.le(mid, rhs, scale));
                if j + 1 < n {
                    grad_prev = grad_curr;
                    grad_curr = problem.gradient(x0)?;
                }
            }
            Check::from_flags(flags)
        }
    };

    let stepsize_cap = match &sched {
        None => Check::not_applicable(n, "no (pi, xi) schedule recorded"),
        Some(s) => {
            let mut flags = vec![None; n];
            for j in 1..n {
                let sp = StepsizePair {
                    gamma_prev: trace.records[j - 1].gamma / rho[j - 1],
                    gamma_curr: trace.records[j - 1].gamma,
                    rho: rho[j - 1],
                };
                if !resolvable(trace, j - 1) {
                    continue;
                }
                let cap = rho_sq_cap(&sp, est(trace, j - 1), &s[j - 1], &s[j]);
                flags[j] = Some(tol.le(rho[j] * rho[j], cap, cap.min(1e300)));
            }
            Check::from_flags(flags)
        }
    };

    let lemma25 = match (&sched, &trace.solver) {
        (Some(s), SolverKind::AdaPg { .. } | SolverKind::General | SolverKind::AdaPgMm) => {
            let b = Lemma25Bounds {
                pi_max: s.iter().map(|p| p.pi).fold(f64::NEG_INFINITY, f64::max),
                xi_min: s.iter().map(|p| p.xi).fold(f64::INFINITY, f64::min),
            };
            let mut flags = vec![None; n];
            let mut r_min = s[0].r();
            for j in 1..n {
                r_min = r_min.min(s[j].r());
                let sp = StepsizePair {
                    gamma_prev: trace.records[j - 1].gamma / rho[j - 1],
                    gamma_curr: trace.records[j - 1].gamma,
                    rho: rho[j - 1],
                };
                if !resolvable(trace, j - 1) {
                    continue;
                }
                if let Some(bound) = one_step_lower_bound(&sp, est(trace, j - 1), b.pi_max, b.xi_min, r_min) {
                    flags[j] = Some(tol.le(bound, trace.records[j].gamma, bound));
                }
            }
            Check::from_flags(flags)
        }
        _ => Check::not_applicable(n, "lower bound not established for this method"),
    };

    let mut lyapunov_values = vec![None; n];
    let mut reference_objective = None;
    let (lyap_check, rate) = match (&sched, &iterates, x_ref) {
        (None, _, _) => {
            (Check::not_applicable(n, "no (pi, xi) schedule recorded"), Check::not_applicable(n, "no (pi, xi) schedule recorded"))
        }
        (_, None, _) => (Check::not_applicable(n, "trace has no iterates"), Check::not_applicable(n, "trace has no iterates")),
        (_, _, None) => (Check::not_applicable(n, "no reference point"), Check::not_applicable(n, "no reference point")),
        (Some(s), Some(its), Some(x_ref)) => {
            let phi_ref = problem
                .evaluate_objective(x_ref)?
                .finite()
                .ok_or_else(|| Error::InvalidParameters("reference point is outside the domain".into()))?;
            reference_objective = Some(phi_ref);
            let objective = |j: isize| -> f64 {
                if j < 0 {
                    problem.evaluate_objective(&trace.x_init).map(|v| v.to_f64()).unwrap_or(f64::INFINITY)
                } else {
                    trace.records[j as usize].objective.to_f64()
                }
            };
            for j in 0..n {
                let x_prev = point(its, j as isize - 1);
                let input = LyapunovInput {
                    x: its[j],
                    x_prev: &x_prev,
                    gap_prev: objective(j as isize - 1) - phi_ref,
                    gamma: trace.records[j].gamma,
                    pi: s[j].pi,
                    rho: rho[j],
                    xi: s[j].xi,
                };
                lyapunov_values[j] = lyapunov(&input, x_ref).ok();
            }
            let best = trace.best_objective().unwrap_or(f64::INFINITY);
            let u1 = lyapunov_values.get(1).copied().flatten();
            let scale = u1.unwrap_or(0.0);
            if phi_ref > best + tol.slack(scale) {
                (
                    Check { flags: vec![None; n], status: CheckStatus::ReferenceInsufficient },
                    Check { flags: vec![None; n], status: CheckStatus::ReferenceInsufficient },
                )
            } else {
                let mut lf = vec![None; n];
                for j in 2..n {
                    if let (Some(prev), Some(curr)) = (lyapunov_values[j - 1], lyapunov_values[j]) {
                        lf[j] = Some(tol.le(curr, prev, scale));
                    }
                }
                let mut rf = vec![None; n];
                if let Some(u1) = u1 {
                    let mut min_gap = f64::INFINITY;
                    let mut gamma_sum = 0.0;
                    for k in 0..n.saturating_sub(1) {
                        min_gap = min_gap.min(objective(k as isize) - phi_ref);
                        gamma_sum += trace.records[k + 1].gamma;
                        rf[k] = Some(tol.le(min_gap, u1 / gamma_sum, scale));
                    }
                }
                (Check::from_flags(lf), Check::from_flags(rf))
            }
        }
    };

    Ok(CertificateReport {
        solver: trace.solver,
        len: n,
        params: *params,
        reference_objective,
        lyapunov_values,
        fne,
        lyapunov: lyap_check,
        curvature_order,
        stepsize_cap,
        lemma25,
        rate,
    })
}

/// Outcome of comparing a constant-parameter run against its eventual
/// stepsize floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloorCheck {
    pub bound: f64,
    /// First record index from which the floor must hold.
    pub threshold: usize,
    pub first_violation: Option<usize>,
}

/// Checks `γₖ ≥ γ_min` for every record past the threshold iteration.
pub fn check_stepsize_floor(trace: &Trace, q: f64, r: f64, lipschitz: f64, tol: Tolerance) -> Result<FloorCheck> {
    let bound = stepsize_lower_bound(q, r, lipschitz)?;
    let gamma0 = trace.records.first().map_or(1.0, |rec| rec.gamma);
    let threshold = lower_bound_threshold(q, gamma0, lipschitz);
    let first_violation =
        trace.records.iter().enumerate().skip(threshold).find(|(_, rec)| !tol.le(bound, rec.gamma, bound)).map(|(k, _)| k);
    Ok(FloorCheck { bound, threshold, first_violation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox::{L1Norm, Zero};
    use crate::smooth::Quadratic;
    use crate::solvers::{run_adapg, run_pg_backtracking, StoppingRule};
    use crate::stepsize::FixedParams;

    #[test]
    fn lyapunov_examples() {
        let x = [1.0, 0.0];
        let zero = LyapunovInput { x: &x, x_prev: &x, gap_prev: 0.0, gamma: 3.0, pi: 1.0, rho: 1.0, xi: 2.0 };
        assert_eq!(lyapunov(&zero, &x).unwrap(), 0.0);

        let hand = LyapunovInput { x: &[1.0], x_prev: &[-1.0], gap_prev: 2.0, gamma: 0.5, pi: 1.0, rho: 1.0, xi: 1.0 };
        assert_eq!(lyapunov(&hand, &[0.0]).unwrap(), 4.5);

        let missing = LyapunovInput { gap_prev: f64::INFINITY, ..hand };
        assert!(lyapunov(&missing, &[0.0]).is_err());
    }

    #[test]
    fn one_dimensional_hand_computation() {
        // f = x²/2, g = 0, γ₀ = 1/2, x⁻¹ = 4, optimum 0
        let p = CompositeProblem::new(Quadratic::diagonal(&[1.0]), Zero);
        let params = FixedParams::new(1.0, 0.5).unwrap();
        let sol = run_adapg(&p, &[4.0], 0.5, params, StoppingRule::iterations(4).keeping_iterates()).unwrap();
        let report = check_trace(&sol.trace, &p, Some(&[0.0]), &CheckParams::default()).unwrap();
        let xs: Vec<f64> = sol.trace.records.iter().map(|r| r.iterate.as_ref().unwrap()[0]).collect();
        let gs = sol.trace.gammas();
        for k in 1..=3 {
            let (x, xp) = (xs[k], xs[k - 1]);
            let rho = gs[k] / gs[k - 1];
            let expected = 0.5 * x * x + gs[k] * (1.0 + rho) * 0.5 * xp * xp + 0.5 * (x - xp) * (x - xp);
            assert!((report.lyapunov_values[k].unwrap() - expected).abs() <= 1e-15 * expected);
        }
        assert_eq!(xs[0], 2.0);
        assert!(report.all_pass(), "{}", report.table());
    }

    fn quadratic_problem(dim: usize) -> (CompositeProblem, f64) {
        let diag: Vec<f64> = (0..dim).map(|i| 0.1 + i as f64).collect();
        let l = diag[dim - 1];
        let h = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
        let q = Quadratic::new(h, vec![1.0; dim], 0.0).unwrap();
        (CompositeProblem::new(q, L1Norm::new(0.05)), l)
    }

    fn reference(p: &CompositeProblem) -> Vec<f64> {
        let x0 = vec![0.0; p.dimension()];
        run_adapg(p, &x0, 1.0, FixedParams::default(), StoppingRule::new(100_000, 1e-13)).unwrap().x
    }

    #[test]
    fn adapg_run_passes_all() {
        let (p, l) = quadratic_problem(20);
        let x_ref = reference(&p);
        let x0: Vec<f64> = (0..20).map(|i| (i as f64).sin() * 3.0).collect();
        let sol = run_adapg(&p, &x0, 1e-2, FixedParams::default(), StoppingRule::iterations(500).keeping_iterates())
            .unwrap();
        let params = CheckParams { lipschitz: Some(l), ..Default::default() };
        let report = check_trace(&sol.trace, &p, Some(&x_ref), &params).unwrap();
        assert!(report.all_pass(), "{}", report.table());
        assert_eq!(report.curvature_order.flags.len(), sol.trace.len());
        assert!(report.lyapunov.checked() > 0 && report.rate.checked() > 0 && report.fne.checked() > 0);
        let json = report.to_json().unwrap();
        assert!(json.contains("\"all_pass\""));
    }

    #[test]
    fn injected_fault_is_located() {
        let (p, _) = quadratic_problem(20);
        let x0 = vec![1.0; 20];
        let mut sol =
            run_adapg(&p, &x0, 1e-2, FixedParams::default(), StoppingRule::iterations(50).keeping_iterates()).unwrap();
        sol.trace.records[10].gamma *= 2.0;
        let report = check_trace(&sol.trace, &p, None, &CheckParams::default()).unwrap();
        assert_eq!(report.stepsize_cap.first_failure(), Some(10));
        assert!(!report.all_pass());
    }

    #[test]
    fn backtracking_is_gated() {
        let (p, l) = quadratic_problem(5);
        let x_ref = reference(&p);
        let sol = run_pg_backtracking(&p, &[1.0; 5], 1.0, 1.5, StoppingRule::iterations(100).keeping_iterates()).unwrap();
        let params = CheckParams { lipschitz: Some(l), ..Default::default() };
        let report = check_trace(&sol.trace, &p, Some(&x_ref), &params).unwrap();
        assert_eq!(report.fne.status, CheckStatus::AllPass);
        assert_eq!(report.curvature_order.status, CheckStatus::AllPass);
        for c in [&report.lyapunov, &report.stepsize_cap, &report.lemma25, &report.rate] {
            assert!(matches!(c.status, CheckStatus::NotApplicable { .. }));
            assert!(c.status.to_string().starts_with("n/a"));
        }
        assert!(report.all_pass());
    }

    #[test]
    fn poor_reference_is_reported() {
        let (p, _) = quadratic_problem(5);
        let sol = run_adapg(&p, &[1.0; 5], 1.0, FixedParams::default(), StoppingRule::iterations(200).keeping_iterates())
            .unwrap();
        let report = check_trace(&sol.trace, &p, Some(&[1.0; 5]), &CheckParams::default()).unwrap();
        assert_eq!(report.lyapunov.status, CheckStatus::ReferenceInsufficient);
        assert!(report.table().contains("reference insufficient"));
    }

    #[test]
    fn floor_holds_after_threshold() {
        let (p, _) = quadratic_problem(10);
        let l = p.smooth().lipschitz().unwrap();
        let sol = run_adapg(&p, &[2.0; 10], 1e-3, FixedParams::default(), StoppingRule::iterations(300)).unwrap();
        let fc = check_stepsize_floor(&sol.trace, 1.5, 0.75, l, Tolerance::default()).unwrap();
        assert_eq!(fc.first_violation, None);
        assert!(fc.threshold > 0);
    }
}
