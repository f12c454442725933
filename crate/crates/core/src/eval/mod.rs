//! Repeated cross-validation, metrics, significance testing and reporting.

mod cv;
mod metrics;
mod report;

pub use cv::{
    plan_folds, run_cv, training_checksum, CvOutcome, CvPlan, EvalTask, GridSearch, RunResult, SupervisedSpec, System,
};
pub use metrics::{accuracy, paired_significance, pearson};
pub use report::{EvalReport, ReportEntry};
