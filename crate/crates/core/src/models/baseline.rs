use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lexicon::{PhraseRecord, Polarity};
use crate::pos::CoarsePos;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    /// Most frequent training label for every phrase.
    Majority,
    /// Score of the final constituent.
    LastUnigram,
    /// Score of the constituent with the largest absolute score.
    MostPolar,
    /// Last adjective, else last verb, else most polar constituent.
    PosRule,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 4] = [
        BaselineKind::Majority,
        BaselineKind::LastUnigram,
        BaselineKind::MostPolar,
        BaselineKind::PosRule,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Majority => "majority",
            BaselineKind::LastUnigram => "last",
            BaselineKind::MostPolar => "most-polar",
            BaselineKind::PosRule => "pos-rule",
        }
    }

    pub fn table_row(self) -> char {
        match self {
            BaselineKind::Majority => 'a',
            BaselineKind::LastUnigram => 'b',
            BaselineKind::MostPolar => 'c',
            BaselineKind::PosRule => 'd',
        }
    }

    /// Whether the baseline yields a real-valued score usable for regression.
    pub fn has_score(self) -> bool {
        self != BaselineKind::Majority
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majority" => Ok(BaselineKind::Majority),
            "last" | "last-unigram" => Ok(BaselineKind::LastUnigram),
            "most-polar" => Ok(BaselineKind::MostPolar),
            "pos-rule" | "pos" => Ok(BaselineKind::PosRule),
            other => Err(Error::Argument(format!("unknown baseline `{other}`"))),
        }
    }
}

/// Training-fold statistics a baseline may consult.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainStats {
    pub majority: Polarity,
}

impl TrainStats {
    /// Modal label; an exact tie goes to positive.
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a PhraseRecord>) -> Self {
        let (mut pos, mut neg) = (0usize, 0usize);
        for r in records {
            match r.label() {
                Polarity::Positive => pos += 1,
                Polarity::Negative => neg += 1,
            }
        }
        TrainStats {
            majority: if pos >= neg {
                Polarity::Positive
            } else {
                Polarity::Negative
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselinePrediction {
    /// `None` for the majority baseline.
    pub score: Option<f64>,
    pub label: Polarity,
}

impl BaselinePrediction {
    fn from_score(score: f64) -> Self {
        BaselinePrediction {
            score: Some(score),
            label: Polarity::from_score(score),
        }
    }
}

fn constituent(record: &PhraseRecord, i: usize) -> f64 {
    record.constituent_scores[i].unwrap_or(0.0)
}

/// Index of the most polar constituent; ties resolve to the rightmost.
fn most_polar_index(record: &PhraseRecord) -> usize {
    let mut best = 0;
    for i in 1..record.n() {
        if constituent(record, i).abs() >= constituent(record, best).abs() {
            best = i;
        }
    }
    best
}

fn last_with(tags: &[CoarsePos], wanted: CoarsePos) -> Option<usize> {
    tags.iter().rposition(|&t| t == wanted)
}

pub fn baseline_predict(
    kind: BaselineKind,
    record: &PhraseRecord,
    stats: Option<&TrainStats>,
) -> Result<BaselinePrediction> {
    record.validate()?;
    match kind {
        BaselineKind::Majority => {
            let stats = stats.ok_or_else(|| {
                Error::Argument("majority baseline needs training label counts".into())
            })?;
            Ok(BaselinePrediction {
                score: None,
                label: stats.majority,
            })
        }
        BaselineKind::LastUnigram => Ok(BaselinePrediction::from_score(constituent(
            record,
            record.n() - 1,
        ))),
        BaselineKind::MostPolar => Ok(BaselinePrediction::from_score(constituent(
            record,
            most_polar_index(record),
        ))),
        BaselineKind::PosRule => {
            let tags = record.pos_tags.as_ref().ok_or_else(|| {
                Error::Argument(format!(
                    "POS rule needs POS tags for `{}`",
                    record.entry.term
                ))
            })?;
            let i = last_with(tags, CoarsePos::Adj)
                .or_else(|| last_with(tags, CoarsePos::Verb))
                .unwrap_or_else(|| most_polar_index(record));
            Ok(BaselinePrediction::from_score(constituent(record, i)))
        }
    }
}
