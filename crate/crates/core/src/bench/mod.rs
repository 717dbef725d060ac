//! Tomita fixtures, evaluation metrics, and the grid experiment runner.

mod metrics;
mod runner;
mod tomita;

pub use metrics::{gen_accuracy, success_rate, GroupKey};
pub use runner::{records_to_csv, run_benchmark, ExperimentRecord, ExperimentSpec};
pub use tomita::{tomita_dfa, tomita_predicate};
