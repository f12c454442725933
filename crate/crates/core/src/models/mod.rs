//! Rule baselines and RBF-kernel support vector models.

mod baseline;
mod kernel;
mod smo;
mod svm;

pub use baseline::{baseline_predict, BaselineKind, BaselinePrediction, TrainStats};
pub use kernel::{rbf, KernelCache};
pub use smo::{SolverConfig, DEFAULT_TOLERANCE};
pub use svm::{svm_train, svr_train, SvmModel, SvmParams, Task, TrainReport};
