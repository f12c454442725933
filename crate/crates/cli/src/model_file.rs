//! Serialized supervised model: feature layout, scaler and SVM.

use polcomp_core::embeddings::EmbeddingStore;
use polcomp_core::eval::{EvalTask, SupervisedSpec};
use polcomp_core::features::{FeatureConfig, MinMaxScaler};
use polcomp_core::lexicon::{PhraseRecord, Polarity};
use polcomp_core::models::{svm_train, svr_train, SvmModel, SvmParams};
use polcomp_core::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub task: EvalTask,
    pub n: usize,
    pub features: FeatureConfig,
    pub scaler: Option<MinMaxScaler>,
    pub model: SvmModel,
}

impl TrainedModel {
    /// Fits on all of `records`, which must share order `n`.
    pub fn fit(
        records: &[PhraseRecord],
        store: Option<&EmbeddingStore>,
        spec: &SupervisedSpec,
        task: EvalTask,
        n: usize,
    ) -> Result<Self> {
        let refs: Vec<&PhraseRecord> = records.iter().collect();
        let dim = store.map_or(0, EmbeddingStore::dim);
        let features = FeatureConfig::fit(spec.features, n, refs.iter().copied(), dim);
        let mut x = features.build_all(&refs, store)?;
        let scaler = if spec.scale {
            let s = MinMaxScaler::fit(&x)?;
            x = s.apply_all(&x)?;
            Some(s)
        } else {
            None
        };
        let mut params = SvmParams::defaults_for_dim(features.len());
        params.c = spec.c.unwrap_or(params.c);
        params.gamma = spec.gamma.unwrap_or(params.gamma);
        params.epsilon = spec.epsilon;
        let model = match task {
            EvalTask::Binary => {
                let y: Vec<f64> = records.iter().map(|r| r.label().sign()).collect();
                svm_train(&x, &y, &params)?.0
            }
            EvalTask::Regression => {
                let y: Vec<f64> = records.iter().map(|r| r.score()).collect();
                svr_train(&x, &y, &params)?.0
            }
        };
        Ok(TrainedModel {
            task,
            n,
            features,
            scaler,
            model,
        })
    }

    /// Model output and the polarity it implies.
    pub fn predict(&self, record: &PhraseRecord, store: Option<&EmbeddingStore>) -> Result<(f64, Polarity)> {
        if record.n() != self.n {
            return Err(Error::Argument(format!(
                "`{}` has {} tokens; the model expects {}",
                record.entry.term,
                record.n(),
                self.n
            )));
        }
        let mut x = self.features.build(record, store)?;
        if let Some(s) = &self.scaler {
            x = s.apply(&x)?;
        }
        let v = self.model.predict(&x)?;
        Ok((v, Polarity::from_score(v)))
    }
}
