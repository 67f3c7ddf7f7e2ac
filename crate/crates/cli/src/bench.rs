use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use adaprox::diagnostics::{check_trace, CertificateReport, CheckParams};
use adaprox::linalg;
use adaprox::solvers::{Registry, RunContext, Solver, StoppingRule};
use adaprox::{Solution, StopReason, Trace};

use crate::config::RunConfig;
use crate::problem::{LoadedProblem, ProblemInfo};

/// Version of the CSV and summary layouts.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 8] =
    ["k", "gamma", "objective", "residual", "ell", "big_l", "cumulative_oracle_calls", "wall_time"];

pub struct Entry {
    pub spec: String,
    pub solver: Box<dyn Solver>,
}

/// Expands the configured specs into solvers, rejecting duplicates and
/// solvers the problem cannot support.
pub fn select_solvers(cfg: &RunConfig, loaded: &LoadedProblem) -> Result<Vec<Entry>> {
    let registry = Registry::default();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for spec in &cfg.solvers {
        for solver in registry.parse(spec).with_context(|| format!("solver '{spec}'"))? {
            let label = solver.label();
            if label == "nesterov" && cfg.lipschitz.or(loaded.info.lipschitz).is_none() {
                bail!("solver 'nesterov' needs a Lipschitz constant; pass --lipschitz");
            }
            if !seen.insert(label.clone()) {
                bail!("solver '{label}' selected twice");
            }
            out.push(Entry { spec: spec.clone(), solver });
        }
    }
    Ok(out)
}

pub fn context(cfg: &RunConfig, loaded: &LoadedProblem) -> RunContext {
    let mut stop = StoppingRule::new(cfg.max_iters, cfg.tol);
    stop.keep_iterates = cfg.diagnostics;
    RunContext { gamma0: cfg.gamma0, lipschitz: cfg.lipschitz.or(loaded.info.lipschitz), stop }
}

pub struct Outcome {
    pub spec: String,
    pub label: String,
    pub solution: Solution,
    pub report: Option<CertificateReport>,
}

pub fn run_all(cfg: &RunConfig, loaded: &LoadedProblem) -> Result<Vec<Outcome>> {
    let entries = select_solvers(cfg, loaded)?;
    let ctx = context(cfg, loaded);
    let mut outcomes = entries
        .into_par_iter()
        .map(|e| {
            let label = e.solver.label();
            let solution = e
                .solver
                .solve(&loaded.problem, &loaded.x0, &ctx)
                .with_context(|| format!("solver {label} failed"))?;
            Ok(Outcome { spec: e.spec, label, solution, report: None })
        })
        .collect::<Result<Vec<_>>>()?;

    if cfg.diagnostics {
        let x_ref = reference_point(loaded, &outcomes);
        let params = CheckParams { lipschitz: ctx.lipschitz, ..Default::default() };
        let reports = outcomes
            .par_iter()
            .map(|o| check_trace(&o.solution.trace, &loaded.problem, x_ref.as_deref(), &params))
            .collect::<adaprox::Result<Vec<_>>>()?;
        for (o, r) in outcomes.iter_mut().zip(reports) {
            o.report = Some(r);
        }
    }
    Ok(outcomes)
}

/// The known minimizer if the instance has one, otherwise the final
/// iterate with the lowest objective across all runs.
fn reference_point(loaded: &LoadedProblem, outcomes: &[Outcome]) -> Option<Vec<f64>> {
    if let Some(x) = &loaded.solution {
        return Some(x.clone());
    }
    outcomes
        .iter()
        .filter_map(|o| {
            let phi = loaded.problem.evaluate_objective(&o.solution.x).ok()?.finite()?;
            Some((phi, &o.solution.x))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, x)| x.clone())
}

#[derive(Debug, Serialize)]
struct Row {
    k: usize,
    gamma: f64,
    objective: f64,
    residual: f64,
    ell: f64,
    big_l: f64,
    cumulative_oracle_calls: u64,
    wall_time: f64,
}

pub fn write_csv(trace: &Trace, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    for r in &trace.records {
        w.serialize(Row {
            k: r.k,
            gamma: r.gamma,
            objective: r.objective.to_f64(),
            residual: r.residual,
            ell: r.ell,
            big_l: r.big_l,
            cumulative_oracle_calls: r.oracle_calls(),
            wall_time: r.wall_time,
        })?;
    }
    if trace.records.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Settings {
    pub gamma0: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub lipschitz: Option<f64>,
    pub diagnostics: bool,
}

#[derive(Debug, Serialize)]
pub struct SolverSummary {
    pub label: String,
    pub spec: String,
    pub csv: String,
    pub iterations: usize,
    pub iterations_to_tol: Option<usize>,
    pub stop_reason: StopReason,
    pub final_objective: f64,
    pub final_residual: f64,
    pub final_gamma: f64,
    pub oracle_calls: u64,
    pub gradient_evals: u64,
    pub prox_evals: u64,
    pub function_evals: u64,
    pub wall_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_to_solution: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub problem: ProblemInfo,
    pub settings: Settings,
    pub solvers: Vec<SolverSummary>,
}

pub fn csv_name(class: &str, label: &str) -> String {
    format!("{class}_{label}.csv")
}

pub fn summarize(cfg: &RunConfig, loaded: &LoadedProblem, outcomes: &[Outcome]) -> Summary {
    let solvers = outcomes
        .iter()
        .map(|o| {
            let t = &o.solution.trace;
            let last = t.last();
            SolverSummary {
                label: o.label.clone(),
                spec: o.spec.clone(),
                csv: csv_name(loaded.info.class, &o.label),
                iterations: t.len(),
                iterations_to_tol: t.iterations_to(cfg.tol),
                stop_reason: t.stop_reason,
                final_objective: last.objective.to_f64(),
                final_residual: last.residual,
                final_gamma: last.gamma,
                oracle_calls: last.oracle_calls(),
                gradient_evals: last.grad_evals,
                prox_evals: last.prox_evals,
                function_evals: last.func_evals,
                wall_time: last.wall_time,
                distance_to_solution: loaded.solution.as_ref().map(|x| linalg::dist(x, &o.solution.x)),
                certificates: o.report.as_ref().map(|r| {
                    r.checks().iter().map(|(name, c)| (name.to_string(), c.status.to_string())).collect()
                }),
            }
        })
        .collect();
    Summary {
        schema_version: SCHEMA_VERSION,
        problem: loaded.info.clone(),
        settings: Settings {
            gamma0: cfg.gamma0,
            tol: cfg.tol,
            max_iters: cfg.max_iters,
            lipschitz: cfg.lipschitz,
            diagnostics: cfg.diagnostics,
        },
        solvers,
    }
}

pub fn table(summary: &Summary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<24} {:>10} {:>12} {:>22} {:>10} {:>9}  certificates",
        "solver", "iters@tol", "residual", "objective", "oracles", "time[s]"
    );
    for s in &summary.solvers {
        let iters = s.iterations_to_tol.map_or_else(|| "-".to_string(), |k| k.to_string());
        let certs = match &s.certificates {
            None => "-".to_string(),
            Some(map) => {
                let failed: Vec<&str> = map
                    .iter()
                    .filter(|(_, v)| v.starts_with("FAIL") || v.starts_with("reference"))
                    .map(|(k, _)| k.as_str())
                    .collect();
                if failed.is_empty() {
                    "ok".to_string()
                } else {
                    format!("failed: {}", failed.join(", "))
                }
            }
        };
        let _ = writeln!(
            out,
            "{:<24} {:>10} {:>12.3e} {:>22.15e} {:>10} {:>9.3}  {}",
            s.label, iters, s.final_residual, s.final_objective, s.oracle_calls, s.wall_time, certs
        );
    }
    out
}

/// Writes into a staging directory inside `out` and moves the finished
/// files into place, so an interrupted or failed run leaves nothing behind.
pub struct Staging {
    out: PathBuf,
    dir: tempfile::TempDir,
    files: Vec<String>,
}

impl Staging {
    pub fn new(out: &Path) -> Result<Self> {
        fs::create_dir_all(out).with_context(|| format!("cannot create output directory {}", out.display()))?;
        let dir = tempfile::Builder::new()
            .prefix(".adaprox-staging-")
            .tempdir_in(out)
            .with_context(|| format!("cannot stage output in {}", out.display()))?;
        Ok(Self { out: out.to_path_buf(), dir, files: Vec::new() })
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.path().join(name)
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut done = Vec::with_capacity(self.files.len());
        for name in &self.files {
            let target = self.out.join(name);
            fs::rename(self.dir.path().join(name), &target)
                .with_context(|| format!("cannot move {} into place", target.display()))?;
            done.push(target);
        }
        Ok(done)
    }
}

/// Runs every solver, writes the CSV traces, certificate reports and the
/// summary, and returns the summary.
pub fn run_benchmark(cfg: &RunConfig, loaded: &LoadedProblem) -> Result<Summary> {
    let outcomes = run_all(cfg, loaded)?;
    let mut staging = Staging::new(&cfg.output)?;
    let class = loaded.info.class;
    for o in &outcomes {
        let path = staging.path(&csv_name(class, &o.label));
        write_csv(&o.solution.trace, &path)?;
        if let Some(report) = &o.report {
            staging.write(&format!("{class}_{}.certificates.json", o.label), report.to_json()?.as_bytes())?;
        }
    }
    let summary = summarize(cfg, loaded, &outcomes);
    staging.write("summary.json", serde_json::to_string_pretty(&summary)?.as_bytes())?;
    staging.commit()?;
    Ok(summary)
}
