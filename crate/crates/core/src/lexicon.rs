//! Sentiment lexicons, phrase records, and opposing-polarity candidate extraction.
//!
//! Lexicon files are UTF-8 TSV with one `term<TAB>score` entry per line, term
//! tokens separated by single spaces. Scores keep the exact decimal string they
//! were read with so that a load/save cycle reproduces the file.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::pos::{CoarsePos, PosMapping};
use crate::{io, Error, Result};

/// Longest term accepted in a lexicon.
pub const MAX_TERM_LEN: usize = 3;

/// A lowercased token with no whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Token(String);

impl Token {
    pub fn new(surface: &str) -> Result<Self> {
        if surface.is_empty() {
            return Err(Error::Argument("empty token".into()));
        }
        if surface.chars().any(char::is_whitespace) {
            return Err(Error::Argument(format!("token `{surface}` contains whitespace")));
        }
        Ok(Token(surface.to_lowercase()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Token {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Token::new(&s)
    }
}

impl From<Token> for String {
    fn from(t: Token) -> String {
        t.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A space-joined sequence of tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Term(Vec<Token>);

impl Term {
    pub fn new(tokens: Vec<Token>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::Argument("empty term".into()));
        }
        Ok(Term(tokens))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> &Token {
        self.0.last().expect("terms are non-empty")
    }
}

impl FromStr for Term {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let tokens = s.split_whitespace().map(Token::new).collect::<Result<Vec<_>>>()?;
        Term::new(tokens)
    }
}

impl TryFrom<String> for Term {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Term> for String {
    fn from(t: Term) -> String {
        t.to_string()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(t.as_str())?;
        }
        Ok(())
    }
}

/// Binary sentiment label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Negative,
    Positive,
}

impl Polarity {
    /// `score >= 0` is positive; an exact zero falls on the positive side.
    pub fn from_score(score: f64) -> Self {
        if score >= 0.0 {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            Polarity::Positive => "pos",
            Polarity::Negative => "neg",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        })
    }
}

impl FromStr for Polarity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" | "pos" | "+" | "+1" | "1" => Ok(Polarity::Positive),
            "negative" | "neg" | "-" | "-1" => Ok(Polarity::Negative),
            other => Err(Error::Argument(format!("unknown polarity label `{other}`"))),
        }
    }
}

/// A lexicon term with its real-valued sentiment score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub term: Term,
    pub score: f64,
    #[serde(skip)]
    raw_score: String,
}

impl LexiconEntry {
    pub fn new(term: Term, score: f64) -> Result<Self> {
        Self::with_raw(term, score, format!("{score:.3}"))
    }

    fn with_raw(term: Term, score: f64, raw_score: String) -> Result<Self> {
        if term.len() > MAX_TERM_LEN {
            return Err(Error::Argument(format!(
                "term `{term}` has {} tokens (max {MAX_TERM_LEN})",
                term.len()
            )));
        }
        if !score.is_finite() || !(-1.0..=1.0).contains(&score) {
            return Err(Error::Argument(format!("score {score} outside [-1, 1]")));
        }
        Ok(LexiconEntry {
            term,
            score,
            raw_score,
        })
    }

    pub fn polarity(&self) -> Polarity {
        polarity_of(self)
    }

    /// The score exactly as it appears in the source file.
    pub fn raw_score(&self) -> &str {
        &self.raw_score
    }
}

pub fn polarity_of(entry: &LexiconEntry) -> Polarity {
    Polarity::from_score(entry.score)
}

/// Entry counts by term length.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LengthCounts {
    pub unigrams: usize,
    pub bigrams: usize,
    pub trigrams: usize,
}

/// A real-valued sentiment lexicon over unigrams and phrases.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    index: HashMap<Term, usize>,
}

impl Lexicon {
    pub fn from_entries(entries: Vec<LexiconEntry>) -> Result<Self> {
        let mut index = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if index.insert(e.term.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate term `{}`", e.term)));
            }
        }
        Ok(Lexicon { entries, index })
    }

    pub fn load_scl(path: &Path) -> Result<Self> {
        Self::read_scl(io::open_reader(path)?, path)
    }

    /// Parses SCL lines from `reader`; `origin` names the source in errors.
    pub fn read_scl(reader: impl BufRead, origin: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        let mut index = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                continue;
            }
            let (term, raw) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, lineno, "missing tab between term and score"))?;
            let term: Term = term
                .parse()
                .map_err(|e: Error| Error::parse(origin, lineno, e.to_string()))?;
            let raw = raw.trim();
            let score: f64 = raw
                .parse()
                .map_err(|_| Error::parse(origin, lineno, format!("non-numeric score `{raw}`")))?;
            let entry = LexiconEntry::with_raw(term, score, raw.to_string())
                .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
            if index.insert(entry.term.clone(), entries.len()).is_some() {
                return Err(Error::parse(origin, lineno, format!("duplicate term `{}`", entry.term)));
            }
            entries.push(entry);
        }
        Ok(Lexicon { entries, index })
    }

    pub fn to_scl_string(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&e.term.to_string());
            out.push('\t');
            out.push_str(&e.raw_score);
            out.push('\n');
        }
        out
    }

    pub fn save_scl(&self, path: &Path) -> Result<()> {
        io::write_atomic(path, self.to_scl_string().as_bytes())
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, term: &Term) -> Option<&LexiconEntry> {
        self.index.get(term).map(|&i| &self.entries[i])
    }

    pub fn unigram_score(&self, token: &Token) -> Option<f64> {
        self.get(&Term(vec![token.clone()])).map(|e| e.score)
    }

    pub fn counts(&self) -> LengthCounts {
        let mut c = LengthCounts::default();
        for e in &self.entries {
            match e.term.len() {
                1 => c.unigrams += 1,
                2 => c.bigrams += 1,
                _ => c.trigrams += 1,
            }
        }
        c
    }
}

/// A categorical word-polarity lexicon (one label per token).
#[derive(Debug, Clone)]
pub struct PolarityLexicon {
    pub name: String,
    pub entries: HashMap<Token, Polarity>,
}

impl PolarityLexicon {
    pub fn new(name: impl Into<String>) -> Self {
        PolarityLexicon {
            name: name.into(),
            entries: HashMap::new(),
        }
    }

    /// Inserts a label, rejecting a token already listed with the other label.
    pub fn insert(&mut self, token: Token, label: Polarity) -> Result<()> {
        match self.entries.get(&token) {
            Some(prev) if *prev != label => Err(Error::Validation(format!(
                "token `{token}` listed as both {prev} and {label} in lexicon `{}`",
                self.name
            ))),
            _ => {
                self.entries.insert(token, label);
                Ok(())
            }
        }
    }

    /// Loads `token<TAB>label` lines; the lexicon is named after the file stem.
    pub fn load(path: &Path) -> Result<Self> {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut lex = PolarityLexicon::new(name);
        for (i, line) in io::open_reader(path)?.lines().enumerate() {
            let line = line?;
            let mut fields = line.split_whitespace();
            let (Some(tok), Some(label)) = (fields.next(), fields.next()) else {
                if line.trim().is_empty() || line.starts_with('#') {
                    continue;
                }
                return Err(Error::parse(path, i + 1, "expected `token<TAB>label`"));
            };
            let tok = Token::new(tok).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
            let label: Polarity = label
                .parse()
                .map_err(|e: Error| Error::parse(path, i + 1, e.to_string()))?;
            lex.insert(tok, label)
                .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        }
        Ok(lex)
    }
}

/// Merges several polarity lexicons. A token keeps a label only when every
/// lexicon listing it agrees; conflicting tokens are left unlabeled.
pub fn consolidate(lexicons: &[PolarityLexicon]) -> HashMap<Token, Polarity> {
    let mut merged: HashMap<Token, Option<Polarity>> = HashMap::new();
    for lex in lexicons {
        for (tok, label) in &lex.entries {
            merged
                .entry(tok.clone())
                .and_modify(|cur| {
                    if *cur != Some(*label) {
                        *cur = None;
                    }
                })
                .or_insert(Some(*label));
        }
    }
    merged
        .into_iter()
        .filter_map(|(t, l)| l.map(|l| (t, l)))
        .collect()
}

/// Reads a pre-tokenized corpus: one sentence per line, space-separated tokens.
pub fn read_corpus(path: &Path) -> Result<Vec<Vec<Token>>> {
    let mut out = Vec::new();
    for line in io::open_reader(path)?.lines() {
        let line = line?;
        let sent = line.split_whitespace().map(Token::new).collect::<Result<Vec<_>>>()?;
        if !sent.is_empty() {
            out.push(sent);
        }
    }
    Ok(out)
}

/// Every distinct `n`-token window containing at least one positive and one
/// negative token under the consolidated labels of `lexicons`.
pub fn extract_opposing_candidates(
    corpus: &[Vec<Token>],
    lexicons: &[PolarityLexicon],
    n: usize,
) -> Result<BTreeSet<Term>> {
    if n != 2 && n != 3 {
        return Err(Error::Argument(format!("n-gram order must be 2 or 3, got {n}")));
    }
    let labels = consolidate(lexicons);
    let found = corpus
        .par_chunks(256)
        .map(|shard| {
            let mut set = BTreeSet::new();
            for sent in shard {
                for window in sent.windows(n) {
                    let mut pos = false;
                    let mut neg = false;
                    for t in window {
                        match labels.get(t) {
                            Some(Polarity::Positive) => pos = true,
                            Some(Polarity::Negative) => neg = true,
                            None => {}
                        }
                    }
                    if pos && neg {
                        set.insert(Term(window.to_vec()));
                    }
                }
            }
            set
        })
        .reduce(BTreeSet::new, |mut a, mut b| {
            a.append(&mut b);
            a
        });
    Ok(found)
}

/// Phrase POS sequences keyed by term, as read from a `term<TAB>tags` file.
#[derive(Debug, Clone, Default)]
pub struct PosAnnotations {
    tags: HashMap<Term, Vec<String>>,
}

impl PosAnnotations {
    pub fn load(path: &Path) -> Result<Self> {
        let mut tags = HashMap::new();
        for (i, line) in io::open_reader(path)?.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (term, seq) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, i + 1, "missing tab between term and tags"))?;
            let term: Term = term
                .parse()
                .map_err(|e: Error| Error::parse(path, i + 1, e.to_string()))?;
            let seq: Vec<String> = seq.split_whitespace().map(str::to_string).collect();
            if seq.len() != term.len() {
                return Err(Error::parse(
                    path,
                    i + 1,
                    format!("{} tags for a {}-token term", seq.len(), term.len()),
                ));
            }
            tags.insert(term, seq);
        }
        Ok(PosAnnotations { tags })
    }

    pub fn insert(&mut self, term: Term, tags: Vec<String>) -> Result<()> {
        if tags.len() != term.len() {
            return Err(Error::Validation(format!("tag count mismatch for `{term}`")));
        }
        self.tags.insert(term, tags);
        Ok(())
    }

    pub fn get(&self, term: &Term) -> Option<&[String]> {
        self.tags.get(term).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

/// A multi-word lexicon entry joined with its POS sequence and constituent scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhraseRecord {
    pub entry: LexiconEntry,
    pub pos_tags: Option<Vec<CoarsePos>>,
    /// Unigram score of each constituent; `None` when the token has no entry.
    pub constituent_scores: Vec<Option<f64>>,
}

impl PhraseRecord {
    pub fn n(&self) -> usize {
        self.entry.term.len()
    }

    pub fn tokens(&self) -> &[Token] {
        self.entry.term.tokens()
    }

    pub fn score(&self) -> f64 {
        self.entry.score
    }

    pub fn label(&self) -> Polarity {
        self.entry.polarity()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.constituent_scores.len() != n {
            return Err(Error::Validation(format!(
                "`{}`: {} constituent scores for {n} tokens",
                self.entry.term,
                self.constituent_scores.len()
            )));
        }
        if let Some(tags) = &self.pos_tags {
            if tags.len() != n {
                return Err(Error::Validation(format!(
                    "`{}`: {} POS tags for {n} tokens",
                    self.entry.term,
                    tags.len()
                )));
            }
        }
        Ok(())
    }
}

/// Builds a record for every multi-word entry of `lexicon`.
///
/// Constituent scores come from the lexicon's own unigram entries. POS tags
/// are attached when `pos` supplies them for the phrase.
pub fn build_phrase_records(
    lexicon: &Lexicon,
    pos: Option<(&PosAnnotations, &PosMapping)>,
) -> Vec<PhraseRecord> {
    lexicon
        .entries()
        .iter()
        .filter(|e| e.term.len() >= 2)
        .map(|e| {
            let constituent_scores = e.term.tokens().iter().map(|t| lexicon.unigram_score(t)).collect();
            let pos_tags = pos.and_then(|(ann, mapping)| {
                ann.get(&e.term)
                    .map(|tags| tags.iter().map(|t| mapping.coarse(t)).collect())
            });
            PhraseRecord {
                entry: e.clone(),
                pos_tags,
                constituent_scores,
            }
        })
        .collect()
}
