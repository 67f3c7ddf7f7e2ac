//! Per-iteration solver traces.

use serde::{Deserialize, Serialize};

use crate::extended::ExtendedReal;
use crate::problem::Point;

/// Which update produced a trace. Diagnostics use this to decide which
/// certificates apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverKind {
    AdaPg { q: f64, r: f64 },
    General,
    AdaPgOriginal,
    AdaPgMm,
    Backtracking { b: f64 },
    Nesterov { lipschitz: f64 },
}

impl SolverKind {
    /// Updates whose iterates are plain proximal gradient steps
    /// `xᵏ⁺¹ = prox_{γₖ₊₁g}(xᵏ − γₖ₊₁∇f(xᵏ))`.
    pub fn is_proximal_gradient(&self) -> bool {
        !matches!(self, SolverKind::Nesterov { .. })
    }

    /// Linesearch-free updates that record `(πₖ, ξₖ)`.
    pub fn is_adaptive(&self) -> bool {
        matches!(
            self,
            SolverKind::AdaPg { .. } | SolverKind::General | SolverKind::AdaPgOriginal | SolverKind::AdaPgMm
        )
    }
}

/// One row of a trace. Record `k` describes `xᵏ` and the stepsize `γₖ`
/// that produced it; record 0 is the initialization step from `x⁻¹`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub gamma: f64,
    /// `γₖ/γₖ₋₁`
    pub rho: f64,
    pub pi: Option<f64>,
    pub xi: Option<f64>,
    pub objective: ExtendedReal,
    /// `‖xᵏ − xᵏ⁻¹‖`
    pub step_norm: f64,
    /// `‖xᵏ − prox_{γₖg}(xᵏ − γₖ∇f(xᵏ))‖ / γₖ`
    pub residual: f64,
    /// Curvature between `xᵏ⁻¹` and `xᵏ`.
    pub ell: f64,
    pub big_l: f64,
    pub grad_evals: u64,
    pub prox_evals: u64,
    pub func_evals: u64,
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterate: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lyapunov: Option<f64>,
}

impl IterationRecord {
    pub fn oracle_calls(&self) -> u64 {
        self.grad_evals + self.prox_evals + self.func_evals
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Tolerance,
    TargetObjective,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub solver: SolverKind,
    /// `x⁻¹`, the user's starting point.
    pub x_init: Point,
    pub records: Vec<IterationRecord>,
    pub stop_reason: StopReason,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> &IterationRecord {
        self.records.last().expect("traces hold at least the initialization record")
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.gamma).collect()
    }

    pub fn has_iterates(&self) -> bool {
        self.records.iter().all(|r| r.iterate.is_some())
    }

    /// First record whose residual is at most `tol`.
    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        self.records.iter().position(|r| r.residual <= tol)
    }

    /// `min_k φ(xᵏ)` over finite objective values.
    pub fn best_objective(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.objective.finite()).reduce(f64::min)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Result of a solver run: the final iterate and the full trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Point,
    pub trace: Trace,
}
