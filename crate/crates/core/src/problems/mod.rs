//! Benchmark problem construction and instance files.

mod builders;
mod instance;
mod lasso;
mod libsvm;

pub use builders::{build_cubic_problem, build_logistic_problem, cubic_from_dataset, default_logistic_lambda};
pub use instance::{load_lasso_instance, save_lasso_instance, InstanceManifest, FORMAT_VERSION};
pub use lasso::{generate_lasso, LassoInstance};
pub use libsvm::{parse_libsvm, parse_libsvm_with, read_libsvm, write_libsvm, LabeledDataset, MAX_FEATURE_INDEX};
