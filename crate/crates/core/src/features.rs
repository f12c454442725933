//! Fixed-length phrase feature vectors.
//!
//! Block order is fixed: unigram bag (or positional one-hot), per-position POS
//! one-hot, per-position sentiment label, per-position sentiment score, then
//! the embedding blocks conc, avg and max. Disabled blocks are omitted.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embeddings::EmbeddingStore;
use crate::lexicon::{PhraseRecord, Polarity};
use crate::pos::CoarsePos;
use crate::{Error, Result};

/// Which feature blocks are switched on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureFlags {
    pub unigrams: bool,
    /// One-hot unigram per position instead of a bag.
    pub positional_unigrams: bool,
    pub pos: bool,
    pub sent_label: bool,
    pub sent_score: bool,
    pub emb_conc: bool,
    pub emb_avg: bool,
    pub emb_max: bool,
}

impl FeatureFlags {
    pub fn is_empty(&self) -> bool {
        *self == FeatureFlags::default()
    }

    pub fn needs_embeddings(&self) -> bool {
        self.emb_conc || self.emb_avg || self.emb_max
    }

    pub fn needs_pos(&self) -> bool {
        self.pos
    }

    /// Letter of the matching row in the standard results table, if any.
    pub fn table_row(&self) -> Option<char> {
        let f = FeatureFlags {
            pos: true,
            sent_score: true,
            ..Default::default()
        };
        let rows = [
            (
                'e',
                FeatureFlags {
                    pos: true,
                    sent_label: true,
                    ..Default::default()
                },
            ),
            ('f', f),
            (
                'g',
                FeatureFlags {
                    unigrams: true,
                    ..f
                },
            ),
            (
                'h',
                FeatureFlags {
                    emb_avg: true,
                    emb_max: true,
                    ..f
                },
            ),
            (
                'i',
                FeatureFlags {
                    emb_conc: true,
                    ..f
                },
            ),
            (
                'j',
                FeatureFlags {
                    emb_conc: true,
                    unigrams: true,
                    ..f
                },
            ),
            (
                'k',
                FeatureFlags {
                    pos: true,
                    emb_conc: true,
                    unigrams: true,
                    ..Default::default()
                },
            ),
        ];
        rows.iter().find(|(_, r)| r == self).map(|(c, _)| *c)
    }
}

impl FromStr for FeatureFlags {
    type Err = Error;

    /// Parses `+`-joined block names: `uni`, `uni-pos`, `pos`, `label`,
    /// `score`, `conc`, `avg`, `max`.
    fn from_str(s: &str) -> Result<Self> {
        let mut f = FeatureFlags::default();
        for part in s.split('+').map(str::trim) {
            match part {
                "uni" => f.unigrams = true,
                "uni-pos" => {
                    f.unigrams = true;
                    f.positional_unigrams = true;
                }
                "pos" => f.pos = true,
                "label" => f.sent_label = true,
                "score" => f.sent_score = true,
                "conc" => f.emb_conc = true,
                "avg" => f.emb_avg = true,
                "max" => f.emb_max = true,
                other => return Err(Error::Argument(format!("unknown feature block `{other}`"))),
            }
        }
        Ok(f)
    }
}

impl fmt::Display for FeatureFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.pos {
            parts.push("pos");
        }
        if self.sent_label {
            parts.push("label");
        }
        if self.sent_score {
            parts.push("score");
        }
        if self.emb_avg {
            parts.push("avg");
        }
        if self.emb_max {
            parts.push("max");
        }
        if self.emb_conc {
            parts.push("conc");
        }
        if self.unigrams {
            parts.push(if self.positional_unigrams { "uni-pos" } else { "uni" });
        }
        f.write_str(&parts.join("+"))
    }
}

#[derive(Serialize, Deserialize)]
struct FeatureConfigData {
    flags: FeatureFlags,
    n: usize,
    vocabulary: Vec<String>,
    pos_tagset: Vec<CoarsePos>,
    embedding_dim: usize,
}

/// Everything needed to turn a phrase record into a vector of fixed length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "FeatureConfigData", into = "FeatureConfigData")]
pub struct FeatureConfig {
    pub flags: FeatureFlags,
    pub n: usize,
    vocabulary: Vec<String>,
    vocab_index: HashMap<String, usize>,
    pub pos_tagset: Vec<CoarsePos>,
    pub embedding_dim: usize,
}

impl From<FeatureConfigData> for FeatureConfig {
    fn from(d: FeatureConfigData) -> Self {
        FeatureConfig::new(d.flags, d.n, d.vocabulary, d.pos_tagset, d.embedding_dim)
    }
}

impl From<FeatureConfig> for FeatureConfigData {
    fn from(c: FeatureConfig) -> Self {
        FeatureConfigData {
            flags: c.flags,
            n: c.n,
            vocabulary: c.vocabulary,
            pos_tagset: c.pos_tagset,
            embedding_dim: c.embedding_dim,
        }
    }
}

impl FeatureConfig {
    pub fn new(
        flags: FeatureFlags,
        n: usize,
        vocabulary: Vec<String>,
        pos_tagset: Vec<CoarsePos>,
        embedding_dim: usize,
    ) -> Self {
        let vocab_index = vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        FeatureConfig {
            flags,
            n,
            vocabulary,
            vocab_index,
            pos_tagset,
            embedding_dim,
        }
    }

    /// Config whose vocabulary is the sorted token set of `train`.
    pub fn fit<'a>(
        flags: FeatureFlags,
        n: usize,
        train: impl IntoIterator<Item = &'a PhraseRecord>,
        embedding_dim: usize,
    ) -> Self {
        let vocabulary: Vec<String> = if flags.unigrams {
            let set: BTreeSet<&str> = train
                .into_iter()
                .flat_map(|r| r.tokens().iter().map(|t| t.as_str()))
                .collect();
            set.into_iter().map(str::to_string).collect()
        } else {
            Vec::new()
        };
        let dim = if flags.needs_embeddings() { embedding_dim } else { 0 };
        FeatureConfig::new(flags, n, vocabulary, CoarsePos::ALL.to_vec(), dim)
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    /// Named block lengths in vector order.
    pub fn layout(&self) -> Vec<(&'static str, usize)> {
        let f = &self.flags;
        let (n, v, t, d) = (self.n, self.vocabulary.len(), self.pos_tagset.len(), self.embedding_dim);
        let mut blocks = Vec::new();
        if f.unigrams {
            blocks.push(("uni", if f.positional_unigrams { n * v } else { v }));
        }
        if f.pos {
            blocks.push(("pos", n * t));
        }
        if f.sent_label {
            blocks.push(("label", n));
        }
        if f.sent_score {
            blocks.push(("score", n));
        }
        if f.emb_conc {
            blocks.push(("conc", n * d));
        }
        if f.emb_avg {
            blocks.push(("avg", d));
        }
        if f.emb_max {
            blocks.push(("max", d));
        }
        blocks
    }

    pub fn len(&self) -> usize {
        self.layout().iter().map(|(_, l)| l).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn build(&self, record: &PhraseRecord, store: Option<&EmbeddingStore>) -> Result<Vec<f64>> {
        let n = record.n();
        if n != self.n {
            return Err(Error::Argument(format!(
                "`{}` has {n} tokens but the feature config expects {}",
                record.entry.term, self.n
            )));
        }
        record.validate()?;
        let f = &self.flags;
        let mut out = Vec::with_capacity(self.len());

        if f.unigrams {
            let v = self.vocabulary.len();
            let base = out.len();
            let width = if f.positional_unigrams { n * v } else { v };
            out.resize(base + width, 0.0);
            for (p, tok) in record.tokens().iter().enumerate() {
                if let Some(&i) = self.vocab_index.get(tok.as_str()) {
                    let slot = if f.positional_unigrams { p * v + i } else { i };
                    out[base + slot] = 1.0;
                }
            }
        }
        if f.pos {
            let tags = record.pos_tags.as_ref().ok_or_else(|| {
                Error::Argument(format!("`{}` has no POS tags", record.entry.term))
            })?;
            for tag in tags {
                for t in &self.pos_tagset {
                    out.push(if t == tag { 1.0 } else { 0.0 });
                }
            }
        }
        if f.sent_label {
            out.extend(
                record
                    .constituent_scores
                    .iter()
                    .map(|s| s.map_or(0.0, |s| Polarity::from_score(s).sign())),
            );
        }
        if f.sent_score {
            out.extend(record.constituent_scores.iter().map(|s| s.unwrap_or(0.0)));
        }
        if f.needs_embeddings() {
            let store = store.ok_or_else(|| {
                Error::Argument("embedding features need an embedding store".into())
            })?;
            let d = self.embedding_dim;
            if store.dim() != d {
                return Err(Error::Argument(format!(
                    "embedding store has dimension {} but the config expects {d}",
                    store.dim()
                )));
            }
            let vecs: Vec<&[f64]> = record.tokens().iter().map(|t| store.lookup(t.as_str())).collect();
            if f.emb_conc {
                for v in &vecs {
                    out.extend_from_slice(v);
                }
            }
            if f.emb_avg {
                out.extend((0..d).map(|j| vecs.iter().map(|v| v[j]).sum::<f64>() / n as f64));
            }
            if f.emb_max {
                out.extend((0..d).map(|j| vecs.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max)));
            }
        }
        debug_assert_eq!(out.len(), self.len());
        Ok(out)
    }

    pub fn build_all(&self, records: &[&PhraseRecord], store: Option<&EmbeddingStore>) -> Result<Vec<Vec<f64>>> {
        records.iter().map(|r| self.build(r, store)).collect()
    }
}

/// Per-dimension affine map of the training range onto [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::Argument("scaler needs at least one row".into()))?;
        let mut min = first.clone();
        let mut max = first.clone();
        for r in &rows[1..] {
            if r.len() != min.len() {
                return Err(Error::Argument(format!(
                    "row of length {} in a {}-column fit",
                    r.len(),
                    min.len()
                )));
            }
            for (j, &x) in r.iter().enumerate() {
                min[j] = min[j].min(x);
                max[j] = max[j].max(x);
            }
        }
        Ok(MinMaxScaler { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.min.len() {
            return Err(Error::Argument(format!(
                "vector of length {} for a {}-column scaler",
                x.len(),
                self.min.len()
            )));
        }
        Ok(x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| {
                if hi > lo {
                    2.0 * (v - lo) / (hi - lo) - 1.0
                } else {
                    0.0
                }
            })
            .collect())
    }

    pub fn apply_all(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.apply(r)).collect()
    }
}

/// One tab-separated row per vector.
pub fn matrix_to_tsv(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{LexiconEntry, Term};
    use std::path::Path;

    fn record(term: &str, tags: &[CoarsePos], scores: &[Option<f64>]) -> PhraseRecord {
        PhraseRecord {
            entry: LexiconEntry::new(term.parse::<Term>().unwrap(), 0.1).unwrap(),
            pos_tags: Some(tags.to_vec()),
            constituent_scores: scores.to_vec(),
        }
    }

    fn store(text: &str) -> EmbeddingStore {
        EmbeddingStore::read_text_vectors(text.as_bytes(), Path::new("v")).unwrap()
    }

    fn flags(s: &str) -> FeatureFlags {
        s.parse().unwrap()
    }

    #[test]
    fn conc_length_for_bigrams() {
        let vals: Vec<String> = (0..200).map(|i| (i as f64).to_string()).collect();
        let s = store(&format!("a {}\nb {}\n", vals.join(" "), vals.join(" ")));
        let r = record("a b", &[CoarsePos::Adj, CoarsePos::Noun], &[Some(0.1), Some(-0.1)]);
        let cfg = FeatureConfig::fit(flags("conc"), 2, [&r], 200);
        assert_eq!(cfg.build(&r, Some(&s)).unwrap().len(), 400);
    }

    #[test]
    fn oov_average_is_zero() {
        let s = store("other 1 2 3\n");
        let r = record("x y", &[CoarsePos::Adj, CoarsePos::Noun], &[Some(0.1), Some(-0.1)]);
        let cfg = FeatureConfig::fit(flags("avg"), 2, [&r], 3);
        assert_eq!(cfg.build(&r, Some(&s)).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn block_contents() {
        let s = store("happy 1 -2\ntears 3 4\n");
        let r = record("happy tears", &[CoarsePos::Adj, CoarsePos::Noun], &[Some(0.6), Some(-0.4)]);
        let cfg = FeatureConfig::fit(flags("pos+label+score+conc+avg+max+uni"), 2, [&r], 2);
        let v = cfg.build(&r, Some(&s)).unwrap();
        let mut want = vec![1.0, 1.0]; // vocab [happy, tears]
        want.extend([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]); // adj
        want.extend([0.0, 0.0, 0.0, 1.0, 0.0, 0.0]); // noun
        want.extend([1.0, -1.0]);
        want.extend([0.6, -0.4]);
        want.extend([1.0, -2.0, 3.0, 4.0]);
        want.extend([2.0, 1.0]);
        want.extend([3.0, 4.0]);
        assert_eq!(v, want);
    }

    #[test]
    fn unknown_vocabulary_token_is_all_zero() {
        let train = record("good day", &[CoarsePos::Adj, CoarsePos::Noun], &[Some(0.5), Some(0.1)]);
        let test = record("bad luck", &[CoarsePos::Adj, CoarsePos::Noun], &[Some(-0.5), Some(0.1)]);
        let cfg = FeatureConfig::fit(flags("uni"), 2, [&train], 0);
        assert_eq!(cfg.build(&test, None).unwrap(), vec![0.0, 0.0]);
        let pcfg = FeatureConfig::fit(flags("uni-pos"), 2, [&train], 0);
        assert_eq!(pcfg.len(), 4);
        assert_eq!(pcfg.build(&train, None).unwrap(), vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn order_mismatch_and_missing_inputs() {
        let r = record("a b c", &[CoarsePos::Adj; 3], &[Some(0.1); 3]);
        let cfg = FeatureConfig::fit(flags("score"), 2, [&r], 0);
        assert!(matches!(cfg.build(&r, None), Err(Error::Argument(_))));
        let cfg = FeatureConfig::fit(flags("conc"), 3, [&r], 4);
        assert!(matches!(cfg.build(&r, None), Err(Error::Argument(_))));
        let mut untagged = r.clone();
        untagged.pos_tags = None;
        let cfg = FeatureConfig::fit(flags("pos"), 3, [&r], 0);
        assert!(cfg.build(&untagged, None).is_err());
    }

    #[test]
    fn table_rows_are_recognized() {
        assert_eq!(flags("pos+label").table_row(), Some('e'));
        assert_eq!(flags("pos+score").table_row(), Some('f'));
        assert_eq!(flags("score+pos+uni").table_row(), Some('g'));
        assert_eq!(flags("pos+score+avg+max").table_row(), Some('h'));
        assert_eq!(flags("pos+score+conc").table_row(), Some('i'));
        assert_eq!(flags("pos+score+conc+uni").table_row(), Some('j'));
        assert_eq!(flags("pos+conc+uni").table_row(), Some('k'));
        assert_eq!(flags("uni").table_row(), None);
        assert!("pos+bogus".parse::<FeatureFlags>().is_err());
        assert_eq!(flags("uni+conc+score+pos").to_string(), "pos+score+conc+uni");
    }

    #[test]
    fn config_serializes_and_rebuilds_index() {
        let r = record("good day", &[CoarsePos::Adj, CoarsePos::Noun], &[Some(0.5), Some(0.1)]);
        let cfg = FeatureConfig::fit(flags("uni+pos"), 2, [&r], 0);
        let json = serde_json::to_string(&cfg).unwrap();
        let back: FeatureConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.build(&r, None).unwrap(), cfg.build(&r, None).unwrap());
    }

    #[test]
    fn scaler_midpoint_and_constant() {
        let s = MinMaxScaler::fit(&[vec![0.0, 7.0], vec![10.0, 7.0]]).unwrap();
        assert_eq!(s.apply(&[5.0, 7.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(s.apply(&[20.0, 1.0]).unwrap(), vec![3.0, 0.0]);
        assert!(s.apply(&[1.0]).is_err());
        assert!(MinMaxScaler::fit(&[]).is_err());
    }
}
