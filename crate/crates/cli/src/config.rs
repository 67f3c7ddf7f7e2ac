use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProblemClass {
    Lasso,
    Logreg,
    Cubic,
}

impl ProblemClass {
    pub fn name(self) -> &'static str {
        match self {
            ProblemClass::Lasso => "lasso",
            ProblemClass::Logreg => "logreg",
            ProblemClass::Cubic => "cubic",
        }
    }
}

/// Problem section of a config file. Every field is optional; missing
/// values fall back to flags and then to defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub class: Option<ProblemClass>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub s: Option<usize>,
    pub lambda: Option<f64>,
    pub seed: Option<u64>,
    pub data: Option<PathBuf>,
    pub instance: Option<PathBuf>,
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub solvers: Option<Vec<String>>,
    pub gamma0: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub lipschitz: Option<f64>,
    pub diagnostics: Option<bool>,
    pub output: Option<PathBuf>,
}

/// Contents of a TOML run manifest:
///
/// ```toml
/// [problem]
/// class = "lasso"
/// n = 200
/// m = 100
///
/// [run]
/// solvers = ["adapg:preset", "adapg-mm"]
/// tol = 1e-8
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub run: RunSection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ProblemArgs {
    /// Problem class.
    #[arg(value_enum)]
    pub class: Option<ProblemClass>,
    /// Lasso: number of unknowns.
    #[arg(long)]
    pub n: Option<usize>,
    /// Lasso: number of observations.
    #[arg(long)]
    pub m: Option<usize>,
    /// Lasso: support size of the planted solution.
    #[arg(long)]
    pub s: Option<usize>,
    /// Weight of the l1 term (lasso, logreg).
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// LIBSVM file (logreg, cubic).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Saved lasso instance directory, instead of generating one.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Cubic: regularization weight.
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Comma-separated solver specs, e.g. `adapg:3/2:3/4,adapg-mm,pg-ls:sweep`.
    #[arg(long, alias = "solver")]
    pub solvers: Option<String>,
    /// Initial stepsize.
    #[arg(long)]
    pub gamma0: Option<f64>,
    /// Residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Lipschitz modulus of the smooth part, overriding the problem's own.
    #[arg(long)]
    pub lipschitz: Option<f64>,
    /// Evaluate the convergence certificates along every run.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub diagnostics: Option<bool>,
    /// Output directory.
    #[arg(long, env = "ADAPROX_OUT_DIR")]
    pub out: Option<PathBuf>,
    /// TOML run manifest; flags take precedence over its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProblemSpec {
    Lasso { n: usize, m: usize, s: usize, lambda: f64, seed: u64 },
    LassoInstance { dir: PathBuf },
    Logreg { data: PathBuf, lambda: Option<f64> },
    Cubic { data: PathBuf, sigma: f64 },
}

impl ProblemSpec {
    pub fn class(&self) -> ProblemClass {
        match self {
            ProblemSpec::Lasso { .. } | ProblemSpec::LassoInstance { .. } => ProblemClass::Lasso,
            ProblemSpec::Logreg { .. } => ProblemClass::Logreg,
            ProblemSpec::Cubic { .. } => ProblemClass::Cubic,
        }
    }
}

/// Validated settings for a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub solvers: Vec<String>,
    pub gamma0: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub lipschitz: Option<f64>,
    pub diagnostics: bool,
    pub output: PathBuf,
}

pub const DEFAULT_SOLVERS: &str = "adapg:preset,adapg-orig,adapg-mm,nesterov,pg-ls:sweep";

impl RunConfig {
    pub fn resolve(problem: &ProblemArgs, run: &RunArgs, default_solvers: &str) -> Result<Self> {
        let file = match &run.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let p = &file.problem;
        let class = problem.class.or(p.class).context("no problem class given (lasso, logreg or cubic)")?;
        let lambda = problem.lambda.or(p.lambda);
        let data = problem.data.clone().or_else(|| p.data.clone());
        let instance = problem.instance.clone().or_else(|| p.instance.clone());

        let spec = match class {
            ProblemClass::Lasso => match instance {
                Some(dir) => ProblemSpec::LassoInstance { dir },
                None => ProblemSpec::Lasso {
                    n: problem.n.or(p.n).unwrap_or(200),
                    m: problem.m.or(p.m).unwrap_or(100),
                    s: problem.s.or(p.s).unwrap_or(10),
                    lambda: lambda.unwrap_or(0.5),
                    seed: problem.seed.or(p.seed).unwrap_or(1),
                },
            },
            ProblemClass::Logreg => {
                ProblemSpec::Logreg { data: data.context("logreg requires --data <libsvm file>")?, lambda }
            }
            ProblemClass::Cubic => ProblemSpec::Cubic {
                data: data.context("cubic requires --data <libsvm file>")?,
                sigma: problem.sigma.or(p.sigma).unwrap_or(1.0),
            },
        };

        let r = &file.run;
        let solvers: Vec<String> = match (&run.solvers, &r.solvers) {
            (Some(list), _) => split_list(list),
            (None, Some(list)) => list.clone(),
            (None, None) => split_list(default_solvers),
        };
        let cfg = Self {
            problem: spec,
            solvers,
            gamma0: run.gamma0.or(r.gamma0).unwrap_or(1.0),
            tol: run.tol.or(r.tol).unwrap_or(1e-8),
            max_iters: run.max_iters.or(r.max_iters).unwrap_or(100_000),
            lipschitz: run.lipschitz.or(r.lipschitz),
            diagnostics: run.diagnostics.or(r.diagnostics).unwrap_or(false),
            output: run.out.clone().or_else(|| r.output.clone()).unwrap_or_else(|| PathBuf::from("adaprox-out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            bail!("no solvers selected");
        }
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            bail!("gamma0 must be positive and finite, got {}", self.gamma0);
        }
        if !(self.tol >= 0.0) {
            bail!("tol must be nonnegative, got {}", self.tol);
        }
        if self.max_iters == 0 {
            bail!("max_iters must be at least 1");
        }
        if let Some(l) = self.lipschitz {
            if !(l > 0.0 && l.is_finite()) {
                bail!("lipschitz must be positive and finite, got {l}");
            }
        }
        Ok(())
    }
}

fn split_list(list: &str) -> Vec<String> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}
