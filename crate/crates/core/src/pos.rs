//! Coarse part-of-speech categories and the fine-to-coarse tag mapping.

use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{io, Error, Result};

/// Coarse tag categories used by patterns and features.
///
/// Variant order is alphabetical by display name; pattern tables sort on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoarsePos {
    Adj,
    Adverb,
    Det,
    Noun,
    Other,
    Verb,
}

impl CoarsePos {
    pub const ALL: [CoarsePos; 6] = [
        CoarsePos::Adj,
        CoarsePos::Adverb,
        CoarsePos::Det,
        CoarsePos::Noun,
        CoarsePos::Other,
        CoarsePos::Verb,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CoarsePos::Adj => "adj",
            CoarsePos::Adverb => "adverb",
            CoarsePos::Det => "det",
            CoarsePos::Noun => "noun",
            CoarsePos::Other => "other",
            CoarsePos::Verb => "verb",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for CoarsePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoarsePos {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_end_matches('.').to_ascii_lowercase();
        Ok(match s.as_str() {
            "adj" | "adjective" => CoarsePos::Adj,
            "adv" | "adverb" => CoarsePos::Adverb,
            "det" | "determiner" => CoarsePos::Det,
            "noun" | "n" => CoarsePos::Noun,
            "verb" | "v" => CoarsePos::Verb,
            "other" => CoarsePos::Other,
            _ => return Err(Error::Argument(format!("unknown coarse POS category `{s}`"))),
        })
    }
}

/// Maps fine tagger output (CMU tweet tags, Penn Treebank tags) to [`CoarsePos`].
///
/// Unmapped tags fall into [`CoarsePos::Other`].
#[derive(Debug, Clone)]
pub struct PosMapping {
    map: HashMap<String, CoarsePos>,
}

impl Default for PosMapping {
    fn default() -> Self {
        use CoarsePos::*;
        let pairs: &[(&str, CoarsePos)] = &[
            // CMU tweet tagset
            ("A", Adj),
            ("R", Adverb),
            ("D", Det),
            ("N", Noun),
            ("^", Noun),
            ("V", Verb),
            // Penn Treebank
            ("JJ", Adj),
            ("JJR", Adj),
            ("JJS", Adj),
            ("RB", Adverb),
            ("RBR", Adverb),
            ("RBS", Adverb),
            ("WRB", Adverb),
            ("DT", Det),
            ("PDT", Det),
            ("WDT", Det),
            ("NN", Noun),
            ("NNS", Noun),
            ("NNP", Noun),
            ("NNPS", Noun),
            ("VB", Verb),
            ("VBD", Verb),
            ("VBG", Verb),
            ("VBN", Verb),
            ("VBP", Verb),
            ("VBZ", Verb),
            ("MD", Verb),
        ];
        let mut map: HashMap<String, CoarsePos> =
            pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for c in CoarsePos::ALL {
            map.insert(c.as_str().to_string(), c);
        }
        for (alias, c) in [("adj.", Adj), ("adv", Adverb), ("adv.", Adverb), ("det.", Det)] {
            map.insert(alias.to_string(), c);
        }
        PosMapping { map }
    }
}

impl PosMapping {
    /// Loads `fine<TAB>coarse` overrides on top of the default mapping.
    pub fn load(path: &Path) -> Result<Self> {
        let mut mapping = PosMapping::default();
        for (i, line) in io::open_reader(path)?.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (fine, coarse) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, i + 1, "expected `fine<TAB>coarse`"))?;
            let coarse: CoarsePos = coarse
                .parse()
                .map_err(|e: Error| Error::parse(path, i + 1, e.to_string()))?;
            mapping.map.insert(fine.trim().to_string(), coarse);
        }
        Ok(mapping)
    }

    pub fn insert(&mut self, fine: &str, coarse: CoarsePos) {
        self.map.insert(fine.to_string(), coarse);
    }

    pub fn coarse(&self, fine: &str) -> CoarsePos {
        if let Some(c) = self.map.get(fine) {
            return *c;
        }
        self.map
            .get(&fine.to_ascii_lowercase())
            .copied()
            .unwrap_or(CoarsePos::Other)
    }
}
