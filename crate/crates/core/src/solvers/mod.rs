//! Solver drivers: the adaptive proximal gradient family, the general
//! time-varying framework, and the comparison baselines.

mod adaptive;
mod backtracking;
mod nesterov;
mod record;
pub mod registry;

use serde::{Deserialize, Serialize};

pub use adaptive::{
    adapg_mm_stepsize, adapg_original_stepsize, run_adapg, run_adapg_baseline, run_adapg_mm, run_general,
    ConstantSchedule, GatedAlternating, Schedule, ScheduleContext,
};
pub use backtracking::{run_pg_backtracking, run_pg_backtracking_with, BacktrackingConfig, BACKTRACKING_FLOOR};
pub use nesterov::{nesterov_momentum, run_nesterov};
pub use registry::{Registry, RunContext, Solver};

/// When to end a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    /// Upper bound on the number of trace records, initialization included.
    pub max_iters: usize,
    /// Stop once the fixed-point residual is at most this value.
    pub tol: f64,
    #[serde(default)]
    pub target_objective: Option<f64>,
    /// Store every iterate in the trace (needed by diagnostics).
    #[serde(default)]
    pub keep_iterates: bool,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self { max_iters: 100_000, tol: 1e-8, target_objective: None, keep_iterates: false }
    }
}

impl StoppingRule {
    pub fn new(max_iters: usize, tol: f64) -> Self {
        Self { max_iters, tol, ..Self::default() }
    }

    /// Runs exactly `n` records unless the residual hits zero.
    pub fn iterations(n: usize) -> Self {
        Self::new(n, 0.0)
    }

    pub fn keeping_iterates(mut self) -> Self {
        self.keep_iterates = true;
        self
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target_objective = Some(target);
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.max_iters < 1 || !(self.tol >= 0.0) {
            return Err(crate::Error::InvalidParameters(format!(
                "stopping rule requires max_iters >= 1 and tol >= 0, got {} and {}",
                self.max_iters, self.tol
            )));
        }
        Ok(())
    }
}
