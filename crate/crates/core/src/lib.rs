//! Adaptive proximal gradient methods that pick stepsizes from local
//! curvature estimates instead of a linesearch, together with an adaptive
//! alternating minimization scheme, benchmark problems, and certificate
//! checks over recorded runs.
//!
//! ```
//! use adaprox::prox::L1Norm;
//! use adaprox::smooth::Quadratic;
//! use adaprox::solvers::{run_adapg, StoppingRule};
//! use adaprox::stepsize::FixedParams;
//! use adaprox::CompositeProblem;
//!
//! let f = Quadratic::shifted(2.0, &[1.0, -3.0]);
//! let problem = CompositeProblem::new(f, L1Norm::new(0.5));
//! let sol = run_adapg(&problem, &[0.0, 0.0], 1.0, FixedParams::default(), StoppingRule::new(1000, 1e-10)).unwrap();
//! assert!((sol.x[0] - 0.75).abs() < 1e-8 && (sol.x[1] + 2.75).abs() < 1e-8);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ama;
pub mod curvature;
pub mod diagnostics;
pub mod error;
pub mod extended;
pub mod linalg;
pub mod problem;
pub mod problems;
pub mod prox;
pub mod smooth;
pub mod solvers;
pub mod sparse;
pub mod stepsize;
pub mod trace;

pub use curvature::{CurvatureEstimates, Tolerance};
pub use error::{Error, OracleError, Result};
pub use extended::ExtendedReal;
pub use problem::{CompositeProblem, Point};
pub use sparse::SparseMatrix;
pub use trace::{IterationRecord, Solution, SolverKind, StopReason, Trace};
