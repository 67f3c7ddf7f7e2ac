//! `adaprox`: run, compare and check adaptive proximal gradient solvers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod bench;
mod config;
mod problem;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use adaprox::curvature::Tolerance;
use adaprox::diagnostics::{check_trace, CheckParams};
use adaprox::problems::{generate_lasso, save_lasso_instance};
use adaprox::solvers::{run_adapg, StoppingRule};
use adaprox::stepsize::{preset_table1, FixedParams};
use adaprox::Trace;

use config::{ProblemArgs, RunArgs, RunConfig, DEFAULT_SOLVERS};

#[derive(Parser)]
#[command(name = "adaprox", version, about = "Adaptive proximal gradient solvers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare solvers on one problem; writes one CSV per solver plus summary.json.
    Bench {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a single solver and print its result.
    Solve(SolveArgs),
    /// Evaluate the convergence certificates of a saved trace.
    Check(CheckArgs),
    /// Generate a problem instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// List the suggested (q, r) parameter pairs.
    Presets,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Write the full trace, iterates included, as JSON.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Write the final point as a one-column CSV.
    #[arg(long)]
    x_out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Trace JSON written by `solve --trace-out`.
    #[arg(long)]
    trace: PathBuf,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Iterations of the reference run used when the problem has no known solution.
    #[arg(long, default_value_t = 100_000)]
    reference_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    atol: f64,
    #[arg(long, default_value_t = 1e-7)]
    rtol: f64,
    /// Lipschitz modulus bounding the curvature estimates.
    #[arg(long)]
    lipschitz: Option<f64>,
    /// Write the full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Exit with status 1 when a certificate fails.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Lasso instance with a planted solution.
    Lasso {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        s: usize,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Instance directory.
        #[arg(long, env = "ADAPROX_OUT_DIR")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Bench { problem, run } => {
            let cfg = RunConfig::resolve(&problem, &run, DEFAULT_SOLVERS)?;
            let loaded = problem::load(&cfg.problem)?;
            let summary = bench::run_benchmark(&cfg, &loaded)?;
            print!("{}", bench::table(&summary));
            println!("wrote {} traces to {}", summary.solvers.len(), cfg.output.display());
        }
        Command::Solve(args) => solve(args)?,
        Command::Check(args) => return check(args),
        Command::Gen(GenCommand::Lasso { n, m, s, lambda, seed, out }) => {
            let inst = generate_lasso(n, m, s, lambda, seed)?;
            save_lasso_instance(&inst, &out)?;
            println!("wrote lasso instance n={n} m={m} s={s} to {}", out.display());
        }
        Command::Presets => {
            println!("{:<12} {:>8} {:>8} {:>12}  balanced", "name", "q", "r", "gamma_min*L");
            for p in preset_table1() {
                println!("{:<12} {:>8.4} {:>8.4} {:>12.6}  {}", p.name, p.q, p.r, p.gamma_min_times_l, p.balanced);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn solve(args: SolveArgs) -> Result<()> {
    let mut cfg = RunConfig::resolve(&args.problem, &args.run, "adapg")?;
    cfg.diagnostics = false;
    let loaded = problem::load(&cfg.problem)?;
    let mut entries = bench::select_solvers(&cfg, &loaded)?;
    if entries.len() != 1 {
        bail!("solve runs exactly one solver, {} selected", entries.len());
    }
    let entry = entries.remove(0);
    let mut ctx = bench::context(&cfg, &loaded);
    ctx.stop.keep_iterates = args.trace_out.is_some();
    let sol = entry.solver.solve(&loaded.problem, &loaded.x0, &ctx)?;
    let last = sol.trace.last();
    println!("solver      {}", entry.solver.label());
    println!("records     {}", sol.trace.len());
    println!("stop        {:?}", sol.trace.stop_reason);
    println!("objective   {:.15e}", last.objective.to_f64());
    println!("residual    {:.3e}", last.residual);
    println!("oracles     {}", last.oracle_calls());
    if let Some(x) = &loaded.solution {
        println!("distance    {:.3e}", adaprox::linalg::dist(x, &sol.x));
    }
    if let Some(path) = &args.trace_out {
        std::fs::write(path, sol.trace.to_json()?).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let Some(path) = &args.x_out {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
        w.write_record(["x"])?;
        for v in &sol.x {
            w.write_record([v.to_string()])?;
        }
        w.flush()?;
    }
    Ok(())
}

fn check(args: CheckArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.trace).with_context(|| format!("cannot read {}", args.trace.display()))?;
    let trace = Trace::from_json(&text).with_context(|| format!("invalid trace {}", args.trace.display()))?;
    let cfg = RunConfig::resolve(&args.problem, &RunArgs::default(), "adapg")?;
    let loaded = problem::load(&cfg.problem)?;
    if trace.x_init.len() != loaded.problem.dimension() {
        bail!("trace dimension {} does not match problem dimension {}", trace.x_init.len(), loaded.problem.dimension());
    }
    let x_ref = match &loaded.solution {
        Some(x) => x.clone(),
        None => {
            let stop = StoppingRule::new(args.reference_iters, 0.0);
            run_adapg(&loaded.problem, &loaded.x0, 1.0, FixedParams::default(), stop)?.x
        }
    };
    let params = CheckParams {
        tol: Tolerance::new(args.atol, args.rtol),
        lipschitz: args.lipschitz.or(loaded.info.lipschitz),
    };
    let report = check_trace(&trace, &loaded.problem, Some(&x_ref), &params)?;
    print!("{}", report.table());
    if let Some(path) = &args.json {
        std::fs::write(path, report.to_json()?).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if args.strict && !report.all_pass() {
        eprintln!("certificate failures");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}
