use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{accuracy, pearson};
use crate::embeddings::EmbeddingStore;
use crate::features::{FeatureConfig, FeatureFlags, MinMaxScaler};
use crate::lexicon::{PhraseRecord, Polarity};
use crate::models::{baseline_predict, svm_train, svr_train, BaselineKind, SvmParams, TrainStats};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalTask {
    /// Phrase polarity; accuracy.
    Binary,
    /// Phrase score; Pearson r.
    Regression,
}

impl fmt::Display for EvalTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalTask::Binary => "binary",
            EvalTask::Regression => "regression",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvPlan {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub stratified: bool,
}

impl CvPlan {
    /// Ten repeats of ten folds; stratified for the binary task only.
    pub fn for_task(task: EvalTask, seed: u64) -> Self {
        CvPlan {
            folds: 10,
            repeats: 10,
            seed,
            stratified: task == EvalTask::Binary,
        }
    }
}

/// Fold index of every item, one assignment per repeat.
///
/// Items are shuffled (within each class when stratified), concatenated, and
/// dealt round-robin, so fold sizes differ by at most one and each class is
/// spread evenly.
pub fn plan_folds(plan: &CvPlan, n: usize, labels: Option<&[Polarity]>) -> Result<Vec<Vec<usize>>> {
    if plan.folds < 2 {
        return Err(Error::Planning(format!("need at least 2 folds, got {}", plan.folds)));
    }
    if n < plan.folds {
        return Err(Error::Planning(format!("{n} items cannot fill {} folds", plan.folds)));
    }
    let groups: Vec<Vec<usize>> = if plan.stratified {
        let labels = labels
            .ok_or_else(|| Error::Planning("stratified folds need labels".into()))?;
        if labels.len() != n {
            return Err(Error::Planning("label count does not match item count".into()));
        }
        let mut groups = Vec::new();
        for class in [Polarity::Negative, Polarity::Positive] {
            let members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
            if members.is_empty() {
                continue;
            }
            if members.len() < plan.folds {
                return Err(Error::Planning(format!(
                    "class {class} has {} members, fewer than {} folds",
                    members.len(),
                    plan.folds
                )));
            }
            groups.push(members);
        }
        groups
    } else {
        vec![(0..n).collect()]
    };

    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut out = Vec::with_capacity(plan.repeats);
    for _ in 0..plan.repeats {
        let mut order = Vec::with_capacity(n);
        for g in &groups {
            let mut g = g.clone();
            g.shuffle(&mut rng);
            order.extend(g);
        }
        let mut assign = vec![0; n];
        for (pos, &item) in order.iter().enumerate() {
            assign[item] = pos % plan.folds;
        }
        out.push(assign);
    }
    Ok(out)
}

/// Optional inner-CV grid search over `C` and `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearch {
    pub c_values: Vec<f64>,
    /// Multipliers of the default `1 / dim`.
    pub gamma_factors: Vec<f64>,
    pub inner_folds: usize,
}

impl Default for GridSearch {
    fn default() -> Self {
        GridSearch {
            c_values: vec![0.1, 1.0, 10.0, 100.0],
            gamma_factors: vec![0.25, 1.0, 4.0],
            inner_folds: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupervisedSpec {
    pub features: FeatureFlags,
    /// Defaults to 1.
    pub c: Option<f64>,
    /// Defaults to `1 / feature dimension`.
    pub gamma: Option<f64>,
    pub epsilon: f64,
    pub scale: bool,
    pub grid: Option<GridSearch>,
}

impl SupervisedSpec {
    pub fn new(features: FeatureFlags) -> Self {
        SupervisedSpec {
            features,
            c: None,
            gamma: None,
            epsilon: 0.1,
            scale: true,
            grid: None,
        }
    }

    fn params_for(&self, dim: usize) -> SvmParams {
        let mut p = SvmParams::defaults_for_dim(dim);
        if let Some(c) = self.c {
            p.c = c;
        }
        if let Some(g) = self.gamma {
            p.gamma = g;
        }
        p.epsilon = self.epsilon;
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum System {
    Baseline(BaselineKind),
    Supervised(SupervisedSpec),
}

impl System {
    pub fn name(&self) -> String {
        match self {
            System::Baseline(k) => k.name().to_string(),
            System::Supervised(s) => s.features.to_string(),
        }
    }

    pub fn table_row(&self) -> Option<char> {
        match self {
            System::Baseline(k) => Some(k.table_row()),
            System::Supervised(s) => s.features.table_row(),
        }
    }

    pub fn supports(&self, task: EvalTask) -> bool {
        match self {
            System::Baseline(k) => task == EvalTask::Binary || k.has_score(),
            System::Supervised(s) => task == EvalTask::Regression || !s.features.is_empty(),
        }
    }
}

impl FromStr for System {
    type Err = Error;

    /// A baseline name or a `+`-joined feature list.
    fn from_str(s: &str) -> Result<Self> {
        if let Ok(k) = s.parse::<BaselineKind>() {
            return Ok(System::Baseline(k));
        }
        Ok(System::Supervised(SupervisedSpec::new(s.parse()?)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub repeat: usize,
    pub fold: usize,
    pub test_size: usize,
    /// `None` when the metric was undefined for this run.
    pub metric: Option<f64>,
    /// Digest of the training terms handed to the fitting step.
    pub train_checksum: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub system: String,
    pub row: Option<char>,
    pub n: usize,
    pub task: EvalTask,
    pub runs: Vec<RunResult>,
}

impl CvOutcome {
    pub fn metrics(&self) -> Vec<f64> {
        self.runs.iter().filter_map(|r| r.metric).collect()
    }

    /// Mean over runs with a defined metric.
    pub fn mean(&self) -> Option<f64> {
        let m = self.metrics();
        if m.is_empty() {
            None
        } else {
            Some(m.iter().sum::<f64>() / m.len() as f64)
        }
    }

    pub fn failed_runs(&self) -> usize {
        self.runs.iter().filter(|r| r.metric.is_none()).count()
    }
}

/// Digest of the terms of `records`, order-insensitive.
pub fn training_checksum<'a>(records: impl IntoIterator<Item = &'a PhraseRecord>) -> u64 {
    let mut terms: Vec<String> = records.into_iter().map(|r| r.entry.term.to_string()).collect();
    terms.sort();
    let mut h = DefaultHasher::new();
    terms.hash(&mut h);
    h.finish()
}

fn score_predictions(task: EvalTask, predicted: &[f64], test: &[&PhraseRecord]) -> Result<f64> {
    match task {
        EvalTask::Binary => {
            let p: Vec<Polarity> = predicted.iter().map(|&v| Polarity::from_score(v)).collect();
            let g: Vec<Polarity> = test.iter().map(|r| r.label()).collect();
            accuracy(&p, &g)
        }
        EvalTask::Regression => {
            let g: Vec<f64> = test.iter().map(|r| r.score()).collect();
            pearson(predicted, &g)
        }
    }
}

/// Predictions for `test` after fitting `system` on `train`: labels as ±1 for
/// the binary task, scores for regression.
fn fit_predict(
    system: &System,
    task: EvalTask,
    n: usize,
    train: &[&PhraseRecord],
    test: &[&PhraseRecord],
    store: Option<&EmbeddingStore>,
    seed: u64,
) -> Result<Vec<f64>> {
    match system {
        System::Baseline(kind) => {
            let stats = TrainStats::from_records(train.iter().copied());
            test.iter()
                .map(|r| {
                    let p = baseline_predict(*kind, r, Some(&stats))?;
                    Ok(match task {
                        EvalTask::Binary => p.label.sign(),
                        EvalTask::Regression => p.score.ok_or_else(|| {
                            Error::Argument(format!("{kind} has no real-valued output"))
                        })?,
                    })
                })
                .collect()
        }
        System::Supervised(spec) => {
            let dim = store.map_or(0, EmbeddingStore::dim);
            let config = FeatureConfig::fit(spec.features, n, train.iter().copied(), dim);
            let mut xtr = config.build_all(train, store)?;
            let mut xte = config.build_all(test, store)?;
            if spec.scale {
                let scaler = MinMaxScaler::fit(&xtr)?;
                xtr = scaler.apply_all(&xtr)?;
                xte = scaler.apply_all(&xte)?;
            }
            let targets: Vec<f64> = match task {
                EvalTask::Binary => train.iter().map(|r| r.label().sign()).collect(),
                EvalTask::Regression => train.iter().map(|r| r.score()).collect(),
            };
            let mut params = spec.params_for(config.len());
            if let Some(grid) = &spec.grid {
                params = tune(grid, &params, task, &xtr, &targets, seed)?;
            }
            let model = match task {
                EvalTask::Binary => svm_train(&xtr, &targets, &params)?.0,
                EvalTask::Regression => svr_train(&xtr, &targets, &params)?.0,
            };
            model.predict_batch(&xte)
        }
    }
}

fn tune(
    grid: &GridSearch,
    base: &SvmParams,
    task: EvalTask,
    x: &[Vec<f64>],
    y: &[f64],
    seed: u64,
) -> Result<SvmParams> {
    let k = grid.inner_folds.max(2).min(x.len());
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15));
    let mut best = (*base, f64::NEG_INFINITY);
    for &c in &grid.c_values {
        for &g in &grid.gamma_factors {
            let params = SvmParams {
                c,
                gamma: base.gamma * g,
                ..*base
            };
            let mut total = 0.0;
            let mut counted = 0;
            for fold in 0..k {
                let (mut xtr, mut ytr, mut xte, mut yte) = (vec![], vec![], vec![], vec![]);
                for (pos, &i) in order.iter().enumerate() {
                    if pos % k == fold {
                        xte.push(x[i].clone());
                        yte.push(y[i]);
                    } else {
                        xtr.push(x[i].clone());
                        ytr.push(y[i]);
                    }
                }
                let fitted = match task {
                    EvalTask::Binary => svm_train(&xtr, &ytr, &params),
                    EvalTask::Regression => svr_train(&xtr, &ytr, &params),
                };
                let Ok((model, _)) = fitted else { continue };
                let pred = model.predict_batch(&xte)?;
                let m = match task {
                    EvalTask::Binary => accuracy(&pred, &yte).ok(),
                    EvalTask::Regression => pearson(&pred, &yte).ok(),
                };
                if let Some(m) = m {
                    total += m;
                    counted += 1;
                }
            }
            if counted > 0 && total / counted as f64 > best.1 {
                best = (params, total / counted as f64);
            }
        }
    }
    Ok(best.0)
}

/// Repeated k-fold evaluation of `system` on `records` (all of one order).
///
/// Everything fitted (vocabulary, scaler, majority label, model) sees only
/// the training folds. Runs execute in parallel and are reported in
/// `(repeat, fold)` order.
pub fn run_cv(
    records: &[PhraseRecord],
    store: Option<&EmbeddingStore>,
    system: &System,
    task: EvalTask,
    plan: &CvPlan,
) -> Result<CvOutcome> {
    let first = records
        .first()
        .ok_or_else(|| Error::Argument("empty dataset".into()))?;
    let n = first.n();
    if let Some(r) = records.iter().find(|r| r.n() != n) {
        return Err(Error::Argument(format!(
            "mixed phrase lengths: `{}` in a {n}-gram dataset",
            r.entry.term
        )));
    }
    if !system.supports(task) {
        return Err(Error::Argument(format!(
            "system {} does not support the {task} task",
            system.name()
        )));
    }
    let labels: Vec<Polarity> = records.iter().map(PhraseRecord::label).collect();
    let assignments = plan_folds(plan, records.len(), Some(&labels))?;

    let jobs: Vec<(usize, usize)> = (0..plan.repeats)
        .flat_map(|r| (0..plan.folds).map(move |f| (r, f)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(repeat, fold)| -> Result<RunResult> {
            let assign = &assignments[repeat];
            let (mut train, mut test) = (Vec::new(), Vec::new());
            for (i, r) in records.iter().enumerate() {
                if assign[i] == fold {
                    test.push(r);
                } else {
                    train.push(r);
                }
            }
            let train_checksum = training_checksum(train.iter().copied());
            let seed = plan.seed ^ ((repeat * plan.folds + fold) as u64);
            let predicted = fit_predict(system, task, n, &train, &test, store, seed)?;
            let metric = match score_predictions(task, &predicted, &test) {
                Ok(m) => Some(m),
                Err(Error::UndefinedCorrelation(msg)) => {
                    log::warn!(
                        "{} repeat {repeat} fold {fold}: {msg}; run excluded",
                        system.name()
                    );
                    None
                }
                Err(e) => return Err(e),
            };
            Ok(RunResult {
                repeat,
                fold,
                test_size: test.len(),
                metric,
                train_checksum,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CvOutcome {
        system: system.name(),
        row: system.table_row(),
        n,
        task,
        runs,
    })
}
