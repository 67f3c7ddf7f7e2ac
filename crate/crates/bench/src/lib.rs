//! Shared fixtures for the criterion benches in `benches/`.

use std::path::PathBuf;

use adaprox::problems::{generate_lasso, LassoInstance};

/// The vendored LIBSVM sample.
pub fn dataset_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/breast_cancer_scale.svm")
}

/// Desk-scale Lasso used by the solver benches.
pub fn lasso(n: usize, m: usize) -> LassoInstance {
    generate_lasso(n, m, n / 20 + 1, 0.5, 11).expect("valid generator parameters")
}

/// Deterministic test vector with entries spread over `[-2, 2]`.
pub fn spread(len: usize) -> Vec<f64> {
    (0..len).map(|i| 4.0 * ((i * 7919) % 1000) as f64 / 1000.0 - 2.0).collect()
}
