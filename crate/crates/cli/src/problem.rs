use anyhow::{Context, Result};
use serde::Serialize;

use adaprox::problems::{
    build_logistic_problem, cubic_from_dataset, default_logistic_lambda, generate_lasso, load_lasso_instance, read_libsvm,
};
use adaprox::{CompositeProblem, Point};

use crate::config::ProblemSpec;

/// Descriptive fields copied into the summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemInfo {
    pub class: &'static str,
    pub dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub lipschitz: Option<f64>,
}

pub struct LoadedProblem {
    pub problem: CompositeProblem,
    pub x0: Point,
    pub info: ProblemInfo,
    /// Known minimizer, when the instance carries one.
    pub solution: Option<Point>,
}

pub fn load(spec: &ProblemSpec) -> Result<LoadedProblem> {
    let class = spec.class().name();
    let (problem, info, solution) = match spec {
        ProblemSpec::Lasso { n, m, s, lambda, seed } => {
            let inst = generate_lasso(*n, *m, *s, *lambda, *seed)?;
            let info = ProblemInfo {
                class,
                dimension: *n,
                samples: Some(*m),
                lambda: Some(*lambda),
                sigma: None,
                seed: Some(*seed),
                source: None,
                lipschitz: None,
            };
            (inst.problem()?, info, inst.planted_solution.clone())
        }
        ProblemSpec::LassoInstance { dir } => {
            let inst = load_lasso_instance(dir).with_context(|| format!("cannot load instance {}", dir.display()))?;
            let info = ProblemInfo {
                class,
                dimension: inst.n(),
                samples: Some(inst.m()),
                lambda: Some(inst.lambda),
                sigma: None,
                seed: inst.seed,
                source: Some(dir.display().to_string()),
                lipschitz: None,
            };
            (inst.problem()?, info, inst.planted_solution.clone())
        }
        ProblemSpec::Logreg { data, lambda } => {
            let ds = read_libsvm(data).with_context(|| format!("cannot read dataset {}", data.display()))?;
            let lambda = match lambda {
                Some(l) => *l,
                None => default_logistic_lambda(&ds)?,
            };
            let info = ProblemInfo {
                class,
                dimension: ds.feature_count(),
                samples: Some(ds.sample_count()),
                lambda: Some(lambda),
                sigma: None,
                seed: None,
                source: Some(data.display().to_string()),
                lipschitz: None,
            };
            (build_logistic_problem(&ds, lambda)?, info, None)
        }
        ProblemSpec::Cubic { data, sigma } => {
            let ds = read_libsvm(data).with_context(|| format!("cannot read dataset {}", data.display()))?;
            let info = ProblemInfo {
                class,
                dimension: ds.feature_count(),
                samples: Some(ds.sample_count()),
                lambda: None,
                sigma: Some(*sigma),
                seed: None,
                source: Some(data.display().to_string()),
                lipschitz: None,
            };
            (cubic_from_dataset(&ds, *sigma)?, info, None)
        }
    };
    let mut info = info;
    info.lipschitz = problem.smooth().lipschitz();
    let x0 = vec![0.0; problem.dimension()];
    Ok(LoadedProblem { problem, x0, info, solution })
}
