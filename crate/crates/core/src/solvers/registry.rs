//! String-keyed solver construction.
//!
//! A solver spec is `name[:arg[:arg…]]`. Numeric arguments accept
//! fractions, so `adapg:10/9:5/6` selects `q = 10/9`, `r = 5/6`.
//!
//! | spec                   | solver                                          |
//! |------------------------|-------------------------------------------------|
//! | `adapg[:q:r]`          | adaptive PG, default `(3/2, 3/4)`               |
//! | `adapg:preset`         | all six suggested `(q, r)` pairs                 |
//! | `general:alternating`  | time-varying `π ∈ {1, 3/2}` gated, `ξ ≡ 1`       |
//! | `adapg-orig`           | original adaptive PG update                     |
//! | `adapg-mm`             | Malitsky–Mishchenko update                      |
//! | `nesterov`             | accelerated PG with `1/L_f` (needs `L_f`)       |
//! | `pg-ls[:b]`            | backtracking, warm start `b·γ` (default 1)      |
//! | `pg-ls:sweep`          | backtracking for `b ∈ {1, 1.1, 1.3, 1.5, 2}`    |

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::problem::CompositeProblem;
use crate::stepsize::{preset_table1, FixedParams};
use crate::trace::Solution;

use super::{
    run_adapg, run_adapg_baseline, run_adapg_mm, run_general, run_nesterov, run_pg_backtracking, GatedAlternating,
    StoppingRule,
};

/// Backtracking warm-start factors of the comparison sweep.
pub const BACKTRACKING_SWEEP: [f64; 5] = [1.0, 1.1, 1.3, 1.5, 2.0];

/// Inputs shared by every solver in a comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunContext {
    pub gamma0: f64,
    /// Global Lipschitz modulus of `∇f`, when known.
    pub lipschitz: Option<f64>,
    pub stop: StoppingRule,
}

impl Default for RunContext {
    fn default() -> Self {
        Self { gamma0: 1.0, lipschitz: None, stop: StoppingRule::default() }
    }
}

pub trait Solver: Send + Sync {
    /// File-name friendly identifier.
    fn label(&self) -> String;

    fn solve(&self, problem: &CompositeProblem, x_init: &[f64], ctx: &RunContext) -> Result<Solution>;
}

type Factory = Box<dyn Fn(&[&str]) -> Result<Vec<Box<dyn Solver>>> + Send + Sync>;

pub struct Registry {
    factories: BTreeMap<String, Factory>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut reg = Self::empty();
        reg.register("adapg", |args| match args {
            [] => Ok(vec![adapg(FixedParams::default())]),
            ["preset"] => Ok(preset_table1().iter().map(|p| adapg(p.params())).collect()),
            [q, r] => Ok(vec![adapg(FixedParams::new(parse_number(q)?, parse_number(r)?)?)]),
            _ => Err(bad_args("adapg", args)),
        });
        reg.register("general", |args| match args {
            [] | ["alternating"] => Ok(vec![Box::new(GeneralAlternating) as Box<dyn Solver>]),
            _ => Err(bad_args("general", args)),
        });
        reg.register("adapg-orig", |args| no_args("adapg-orig", args, || Box::new(AdaPgOriginal)));
        reg.register("adapg-mm", |args| no_args("adapg-mm", args, || Box::new(AdaPgMm)));
        reg.register("nesterov", |args| no_args("nesterov", args, || Box::new(Nesterov)));
        reg.register("pg-ls", |args| match args {
            [] => Ok(vec![backtracking(1.0)?]),
            ["sweep"] => BACKTRACKING_SWEEP.iter().map(|&b| backtracking(b)).collect(),
            [b] => Ok(vec![backtracking(parse_number(b)?)?]),
            _ => Err(bad_args("pg-ls", args)),
        });
        reg
    }
}

impl Registry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn register(
        &mut self,
        name: &str,
        factory: impl Fn(&[&str]) -> Result<Vec<Box<dyn Solver>>> + Send + Sync + 'static,
    ) {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    /// Builds the solvers named by a single spec.
    pub fn parse(&self, spec: &str) -> Result<Vec<Box<dyn Solver>>> {
        let mut parts = spec.trim().split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown solver '{name}'")))?;
        factory(&args)
    }

    /// Builds the solvers of a comma-separated list.
    pub fn parse_list(&self, list: &str) -> Result<Vec<Box<dyn Solver>>> {
        let mut out = Vec::new();
        for spec in list.split(',').filter(|s| !s.trim().is_empty()) {
            out.extend(self.parse(spec)?);
        }
        if out.is_empty() {
            return Err(Error::InvalidParameters("no solvers selected".into()));
        }
        Ok(out)
    }
}

/// Parses `1.5`, `3/2`, `1e-3`.
pub fn parse_number(s: &str) -> Result<f64> {
    let bad = || Error::InvalidParameters(format!("not a number: '{s}'"));
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            a / b
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn bad_args(name: &str, args: &[&str]) -> Error {
    Error::InvalidParameters(format!("unexpected arguments for '{name}': {}", args.join(":")))
}

fn no_args(name: &str, args: &[&str], make: impl Fn() -> Box<dyn Solver>) -> Result<Vec<Box<dyn Solver>>> {
    if args.is_empty() {
        Ok(vec![make()])
    } else {
        Err(bad_args(name, args))
    }
}

fn adapg(p: FixedParams) -> Box<dyn Solver> {
    Box::new(AdaPg(p))
}

fn backtracking(b: f64) -> Result<Box<dyn Solver>> {
    if !(b >= 1.0) {
        return Err(Error::InvalidParameters(format!("backtracking requires b >= 1, got {b}")));
    }
    Ok(Box::new(Backtracking(b)))
}

fn short(v: f64) -> String {
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

struct AdaPg(FixedParams);

impl Solver for AdaPg {
    fn label(&self) -> String {
        format!("adapg_q{}_r{}", short(self.0.q), short(self.0.r))
    }

    fn solve(&self, problem: &CompositeProblem, x_init: &[f64], ctx: &RunContext) -> Result<Solution> {
        run_adapg(problem, x_init, ctx.gamma0, self.0, ctx.stop)
    }
}

struct GeneralAlternating;

impl Solver for GeneralAlternating {
    fn label(&self) -> String {
        "general_alternating".into()
    }

    fn solve(&self, problem: &CompositeProblem, x_init: &[f64], ctx: &RunContext) -> Result<Solution> {
        run_general(problem, x_init, ctx.gamma0, &mut GatedAlternating::default(), ctx.stop)
    }
}

struct AdaPgOriginal;

impl Solver for AdaPgOriginal {
    fn label(&self) -> String {
        "adapg_orig".into()
    }

    fn solve(&self, problem: &CompositeProblem, x_init: &[f64], ctx: &RunContext) -> Result<Solution> {
        run_adapg_baseline(problem, x_init, ctx.gamma0, ctx.stop)
    }
}

struct AdaPgMm;

impl Solver for AdaPgMm {
    fn label(&self) -> String {
        "adapg_mm".into()
    }

    fn solve(&self, problem: &CompositeProblem, x_init: &[f64], ctx: &RunContext) -> Result<Solution> {
        run_adapg_mm(problem, x_init, ctx.gamma0, ctx.stop)
    }
}

struct Nesterov;

impl Solver for Nesterov {
    fn label(&self) -> String {
        "nesterov".into()
    }

    fn solve(&self, problem: &CompositeProblem, x_init: &[f64], ctx: &RunContext) -> Result<Solution> {
        let l = ctx
            .lipschitz
            .or_else(|| problem.smooth().lipschitz())
            .ok_or_else(|| Error::Missing("Lipschitz constant required by nesterov".into()))?;
        run_nesterov(problem, x_init, l, ctx.stop)
    }
}

struct Backtracking(f64);

impl Solver for Backtracking {
    fn label(&self) -> String {
        format!("pg_ls_b{}", short(self.0))
    }

    fn solve(&self, problem: &CompositeProblem, x_init: &[f64], ctx: &RunContext) -> Result<Solution> {
        run_pg_backtracking(problem, x_init, ctx.gamma0, self.0, ctx.stop)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        let reg = Registry::default();
        let labels: Vec<String> = reg
            .parse_list("adapg:1.5:0.75,adapg:1:1/2,adapg-mm,nesterov,pg-ls:1.5")
            .unwrap()
            .iter()
            .map(|s| s.label())
            .collect();
        assert_eq!(labels, ["adapg_q1.5_r0.75", "adapg_q1_r0.5", "adapg_mm", "nesterov", "pg_ls_b1.5"]);
        assert_eq!(reg.parse("pg-ls:sweep").unwrap().len(), 5);
        assert_eq!(reg.parse("adapg:preset").unwrap().len(), 6);
        assert_eq!(reg.parse("adapg:10/9:5/6").unwrap()[0].label(), "adapg_q1.1111_r0.8333");
    }

    #[test]
    fn rejects_bad_specs() {
        let reg = Registry::default();
        let err = reg.parse("adapg:0.5:0.75").err().unwrap();
        assert!(err.to_string().contains("requires q > r ≥ 1/2"));
        assert!(reg.parse("simplex").is_err());
        assert!(reg.parse("pg-ls:0.5").is_err());
        assert!(reg.parse("adapg:1:x").is_err());
        assert!(reg.parse("nesterov:3").is_err());
        assert!(reg.parse_list(" , ").is_err());
    }

    #[test]
    fn custom_registration() {
        let mut reg = Registry::empty();
        reg.register("mine", |_| Ok(vec![Box::new(AdaPgMm) as Box<dyn Solver>]));
        assert_eq!(reg.names().collect::<Vec<_>>(), ["mine"]);
        assert!(reg.parse("mine").is_ok());
    }
}
