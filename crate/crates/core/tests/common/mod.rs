#![allow(dead_code)]

use std::path::PathBuf;

use adaprox::problems::{
    build_logistic_problem, cubic_from_dataset, default_logistic_lambda, generate_lasso, read_libsvm, LabeledDataset,
};
use adaprox::solvers::{run_adapg, StoppingRule};
use adaprox::stepsize::FixedParams;
use adaprox::CompositeProblem;

pub struct SuiteProblem {
    pub name: &'static str,
    pub problem: CompositeProblem,
    pub x0: Vec<f64>,
    pub lipschitz: Option<f64>,
}

pub fn data_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/breast_cancer_scale.svm")
}

pub fn dataset() -> LabeledDataset {
    read_libsvm(&data_path()).expect("vendored dataset")
}

pub fn lasso() -> SuiteProblem {
    let inst = generate_lasso(200, 100, 10, 0.5, 7).unwrap();
    let problem = inst.problem().unwrap();
    let lipschitz = problem.smooth().lipschitz();
    SuiteProblem { name: "lasso", problem, x0: vec![0.0; 200], lipschitz }
}

pub fn logistic() -> SuiteProblem {
    let ds = dataset();
    let lambda = default_logistic_lambda(&ds).unwrap();
    let problem = build_logistic_problem(&ds, lambda).unwrap();
    let lipschitz = problem.smooth().lipschitz();
    SuiteProblem { name: "logistic", problem, x0: vec![0.0; ds.feature_count()], lipschitz }
}

pub fn cubic() -> SuiteProblem {
    let ds = dataset();
    let problem = cubic_from_dataset(&ds, 1.0).unwrap();
    let lipschitz = None;
    SuiteProblem { name: "cubic", problem, x0: vec![0.0; ds.feature_count()], lipschitz }
}

pub fn suite() -> Vec<SuiteProblem> {
    vec![lasso(), logistic(), cubic()]
}

/// Long default-parameter run used as a stand-in for the minimizer.
pub fn reference(p: &SuiteProblem, iterations: usize) -> Vec<f64> {
    run_adapg(&p.problem, &p.x0, 1.0, FixedParams::default(), StoppingRule::iterations(iterations)).unwrap().x
}
