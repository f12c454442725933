//! Sentiment composition pattern mining.
//!
//! A pattern's left-hand side is the ordered list of constituent slots, each a
//! coarse POS with the constituent's polarity (or no polarity for neutral
//! words). The right-hand side is the phrase polarity. The occurrence rate is
//! the share of phrases with that left-hand side whose polarity equals the
//! right-hand side.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lexicon::{PhraseRecord, Polarity};
use crate::pos::CoarsePos;
use crate::{Error, Result};

/// One constituent position of a pattern.
///
/// Ordering is by POS first, then polarity with neutral before negative before
/// positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub pos: CoarsePos,
    pub polarity: Option<Polarity>,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Some(p) => write!(f, "{} {}", p.short(), self.pos),
            None => write!(f, "{}", self.pos),
        }
    }
}

impl FromStr for Slot {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        match parts.as_slice() {
            [pos] => Ok(Slot {
                pos: pos.parse()?,
                polarity: None,
            }),
            [pol, pos] => Ok(Slot {
                pos: pos.parse()?,
                polarity: Some(pol.parse()?),
            }),
            _ => Err(Error::Argument(format!("bad pattern slot `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lhs(pub Vec<Slot>);

impl fmt::Display for Lhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Lhs {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.split('+').map(str::parse).collect::<Result<Vec<_>>>().map(Lhs)
    }
}

/// A mined sentiment composition pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scp {
    pub lhs: Lhs,
    pub rhs: Polarity,
    /// Phrases whose constituents match `lhs`.
    pub support: usize,
    /// Of those, phrases whose polarity is `rhs`.
    pub matched: usize,
    pub occurrence_rate: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct MiningOptions {
    pub min_support: usize,
    pub min_rate: f64,
    /// Constituents with `|score| < neutral_threshold` get no polarity.
    /// At 0 only constituents without a unigram score are neutral.
    pub neutral_threshold: f64,
}

impl Default for MiningOptions {
    fn default() -> Self {
        MiningOptions {
            min_support: 10,
            min_rate: 0.5,
            neutral_threshold: 0.0,
        }
    }
}

/// The pattern left-hand side describing `record`.
pub fn lhs_of(record: &PhraseRecord, neutral_threshold: f64) -> Result<Lhs> {
    record.validate()?;
    let tags = record.pos_tags.as_ref().ok_or_else(|| {
        Error::Validation(format!("`{}` has no POS tags", record.entry.term))
    })?;
    Ok(Lhs(tags
        .iter()
        .zip(&record.constituent_scores)
        .map(|(&pos, score)| Slot {
            pos,
            polarity: score
                .filter(|s| s.abs() >= neutral_threshold)
                .map(Polarity::from_score),
        })
        .collect()))
}

pub fn mine(records: &[PhraseRecord], min_support: usize, min_rate: f64) -> Result<Vec<Scp>> {
    mine_with(
        records,
        &MiningOptions {
            min_support,
            min_rate,
            ..MiningOptions::default()
        },
    )
}

/// One pattern per left-hand side and majority right-hand side (both sides on
/// an exact tie), kept when support and rate pass the thresholds. Sorted by
/// left-hand side, then right-hand side.
pub fn mine_with(records: &[PhraseRecord], opts: &MiningOptions) -> Result<Vec<Scp>> {
    if opts.min_support == 0 {
        return Err(Error::Argument("min_support must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&opts.min_rate) {
        return Err(Error::Argument(format!("min_rate {} outside [0, 1]", opts.min_rate)));
    }
    let mut groups: HashMap<Lhs, (usize, usize)> = HashMap::new();
    for r in records {
        let lhs = lhs_of(r, opts.neutral_threshold)?;
        let g = groups.entry(lhs).or_default();
        match r.label() {
            Polarity::Negative => g.0 += 1,
            Polarity::Positive => g.1 += 1,
        }
    }
    let mut out = Vec::new();
    for (lhs, (neg, pos)) in groups {
        let support = neg + pos;
        if support < opts.min_support {
            continue;
        }
        for (rhs, matched) in [(Polarity::Negative, neg), (Polarity::Positive, pos)] {
            let other = support - matched;
            let rate = matched as f64 / support as f64;
            if matched >= other && rate >= opts.min_rate {
                out.push(Scp {
                    lhs: lhs.clone(),
                    rhs,
                    support,
                    matched,
                    occurrence_rate: rate,
                });
            }
        }
    }
    out.sort_by(|a, b| a.lhs.cmp(&b.lhs).then(a.rhs.cmp(&b.rhs)));
    Ok(out)
}

pub const REPORT_HEADER: [&str; 4] = ["lhs", "rhs", "occ", "support"];

/// Tab-separated pattern table with a header row.
pub fn report_tsv(scps: &[Scp]) -> String {
    let mut out = REPORT_HEADER.join("\t");
    out.push('\n');
    for s in scps {
        out.push_str(&format!(
            "{}\t{}\t{:.2}\t{}\n",
            s.lhs,
            s.rhs.short(),
            s.occurrence_rate,
            s.support
        ));
    }
    out
}

/// Column-aligned plain-text pattern table.
pub fn report_text(scps: &[Scp]) -> String {
    let rows: Vec<String> = scps
        .iter()
        .map(|s| format!("{} -> {} phrase", s.lhs, s.rhs.short()))
        .collect();
    let width = rows
        .iter()
        .map(String::len)
        .chain(std::iter::once("pattern".len()))
        .max()
        .unwrap_or(0);
    let mut out = format!("{:<width$}  {:>5}  {:>9}\n", "pattern", "occ", "# phrases");
    for (row, s) in rows.iter().zip(scps) {
        out.push_str(&format!(
            "{row:<width$}  {:>5.2}  {:>9}\n",
            s.occurrence_rate, s.support
        ));
    }
    out
}
