use serde::{Deserialize, Serialize};

use super::kernel::{rbf, KernelCache};
use super::smo::{Dual, SolverConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classification,
    Regression,
}

/// Hyperparameters shared by the classifier and the regressor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    pub gamma: f64,
    /// Tube half-width; regression only.
    pub epsilon: f64,
    pub solver: SolverConfig,
}

impl SvmParams {
    /// `C = 1`, `gamma = 1 / dim`, `epsilon = 0.1`.
    pub fn defaults_for_dim(dim: usize) -> Self {
        SvmParams {
            c: 1.0,
            gamma: 1.0 / dim.max(1) as f64,
            epsilon: 0.1,
            solver: SolverConfig::default(),
        }
    }
}

/// Solver diagnostics for one fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Final dual objective value.
    pub objective: f64,
    pub iterations: usize,
    /// Maximal KKT violation at termination.
    pub kkt_gap: f64,
}

/// A trained RBF-kernel model: `f(x) = sum_i coef_i K(sv_i, x) + bias`.
///
/// Classification coefficients are `alpha_i y_i`; regression coefficients
/// are `alpha_i - alpha_i*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub task: Task,
    pub gamma: f64,
    pub c: f64,
    pub epsilon: Option<f64>,
    pub dim: usize,
    pub support_vectors: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
    pub bias: f64,
}

impl SvmModel {
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Argument(format!(
                "input of length {} for a model trained on {} features",
                x.len(),
                self.dim
            )));
        }
        Ok(self
            .support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, c)| c * rbf(sv, x, self.gamma))
            .sum::<f64>()
            + self.bias)
    }

    /// Decision value, mapped to `{-1, +1}` for classifiers (0 counts as +1).
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let f = self.decision(x)?;
        Ok(match self.task {
            Task::Classification => {
                if f >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Task::Regression => f,
        })
    }

    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.predict(x)).collect()
    }
}

fn check_inputs(x: &[Vec<f64>], targets: &[f64], params: &SvmParams) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::Argument("no training samples".into()));
    }
    if x.len() != targets.len() {
        return Err(Error::Argument(format!(
            "{} samples but {} targets",
            x.len(),
            targets.len()
        )));
    }
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(Error::Argument(format!("C must be positive, got {}", params.c)));
    }
    if !(params.gamma > 0.0 && params.gamma.is_finite()) {
        return Err(Error::Argument(format!("gamma must be positive, got {}", params.gamma)));
    }
    let dim = x[0].len();
    for (i, row) in x.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Validation(format!(
                "sample {i} has {} features, expected {dim}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("sample {i} has a non-finite feature")));
        }
    }
    if let Some(i) = targets.iter().position(|t| !t.is_finite()) {
        return Err(Error::Validation(format!("target {i} is not finite")));
    }
    Ok(dim)
}

fn collect_model(
    task: Task,
    params: &SvmParams,
    dim: usize,
    x: &[Vec<f64>],
    coef: Vec<f64>,
    rho: f64,
) -> SvmModel {
    let (support_vectors, coefficients) = x
        .iter()
        .zip(coef)
        .filter(|(_, c)| *c != 0.0)
        .map(|(xi, c)| (xi.clone(), c))
        .unzip();
    SvmModel {
        task,
        gamma: params.gamma,
        c: params.c,
        epsilon: (task == Task::Regression).then_some(params.epsilon),
        dim,
        support_vectors,
        coefficients,
        bias: -rho,
    }
}

/// C-SVM binary classifier; labels must be exactly -1 or +1.
pub fn svm_train(x: &[Vec<f64>], labels: &[f64], params: &SvmParams) -> Result<(SvmModel, TrainReport)> {
    let dim = check_inputs(x, labels, params)?;
    if let Some(i) = labels.iter().position(|&y| y != 1.0 && y != -1.0) {
        return Err(Error::Validation(format!("label {i} is {}, expected -1 or +1", labels[i])));
    }
    if labels.iter().all(|&y| y == labels[0]) {
        return Err(Error::Training("training data contains a single class".into()));
    }
    let l = x.len();
    let dual = Dual {
        kernel: KernelCache::new(x, params.gamma, params.solver.cache_bytes),
        sample: (0..l).collect(),
        y: labels.to_vec(),
        p: vec![-1.0; l],
        c: params.c,
    };
    let sol = dual.solve(&params.solver);
    let coef = sol.alpha.iter().zip(labels).map(|(a, y)| a * y).collect();
    let report = TrainReport {
        objective: sol.objective,
        iterations: sol.iterations,
        kkt_gap: sol.gap,
    };
    Ok((
        collect_model(Task::Classification, params, dim, x, coef, sol.rho),
        report,
    ))
}

/// Epsilon-insensitive support vector regression.
pub fn svr_train(x: &[Vec<f64>], targets: &[f64], params: &SvmParams) -> Result<(SvmModel, TrainReport)> {
    let dim = check_inputs(x, targets, params)?;
    if !(params.epsilon >= 0.0 && params.epsilon.is_finite()) {
        return Err(Error::Argument(format!(
            "epsilon must be non-negative, got {}",
            params.epsilon
        )));
    }
    let l = x.len();
    let mut y = vec![1.0; l];
    y.extend(std::iter::repeat_n(-1.0, l));
    let mut p: Vec<f64> = targets.iter().map(|z| params.epsilon - z).collect();
    p.extend(targets.iter().map(|z| params.epsilon + z));
    let dual = Dual {
        kernel: KernelCache::new(x, params.gamma, params.solver.cache_bytes),
        sample: (0..l).chain(0..l).collect(),
        y,
        p,
        c: params.c,
    };
    let sol = dual.solve(&params.solver);
    let coef = (0..l).map(|i| sol.alpha[i] - sol.alpha[i + l]).collect();
    let report = TrainReport {
        objective: sol.objective,
        iterations: sol.iterations,
        kkt_gap: sol.gap,
    };
    Ok((collect_model(Task::Regression, params, dim, x, coef, sol.rho), report))
}
