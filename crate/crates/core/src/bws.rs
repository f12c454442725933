//! Best-Worst Scaling: tuple design, response ingestion, counting scores and
//! inter-annotator agreement.
//!
//! Tuples and responses are stored as JSON Lines. Scores are exported in the
//! same `term<TAB>score` shape as lexicon files.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{io, Error, Result};

/// Items shown per question.
pub const TUPLE_SIZE: usize = 4;

/// Default number of tuples each term appears in.
pub const DEFAULT_TUPLES_PER_TERM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BwsTuple {
    pub id: String,
    pub items: [String; TUPLE_SIZE],
}

impl BwsTuple {
    pub fn contains(&self, term: &str) -> bool {
        self.items.iter().any(|t| t == term)
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..TUPLE_SIZE {
            for j in i + 1..TUPLE_SIZE {
                if self.items[i] == self.items[j] {
                    return Err(Error::Validation(format!(
                        "tuple {} repeats item `{}`",
                        self.id, self.items[i]
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BwsResponse {
    pub tuple_id: String,
    pub annotator: String,
    pub best: String,
    pub worst: String,
    pub timestamp: DateTime<Utc>,
}

impl BwsResponse {
    /// Checks the response against the tuple it answers.
    pub fn check_against(&self, tuple: &BwsTuple) -> std::result::Result<(), String> {
        if self.best == self.worst {
            return Err("best and worst must differ".into());
        }
        if !tuple.contains(&self.best) {
            return Err(format!("best `{}` is not an item of tuple {}", self.best, tuple.id));
        }
        if !tuple.contains(&self.worst) {
            return Err(format!("worst `{}` is not an item of tuple {}", self.worst, tuple.id));
        }
        Ok(())
    }
}

/// Counting-procedure result for one term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermScore {
    pub best: u32,
    pub worst: u32,
    pub appearances: u32,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BwsScoreTable {
    pub terms: BTreeMap<String, TermScore>,
}

impl BwsScoreTable {
    pub fn get(&self, term: &str) -> Option<&TermScore> {
        self.terms.get(term)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms ordered by descending score, ties by term.
    pub fn ranked(&self) -> Vec<(&str, &TermScore)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, s)| (k.as_str(), s)).collect();
        v.sort_by(|a, b| b.1.score.total_cmp(&a.1.score).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Lexicon-format export, three decimals, ranked order.
    pub fn to_scl_string(&self) -> String {
        let mut out = String::new();
        for (term, s) in self.ranked() {
            // avoid "-0.000"
            let v = if s.score.abs() < 5e-4 { 0.0 } else { s.score };
            out.push_str(&format!("{term}\t{v:.3}\n"));
        }
        out
    }
}

/// Random balanced tuple design.
///
/// Produces `ceil(k * |terms| / 4)` tuples from `k` shuffled rounds over the
/// terms. Intra-tuple repeats and set-equal tuples are repaired by swapping
/// slots between tuples, which keeps every term's appearance count at `k` or
/// `k + 1`.
pub fn generate_tuples(terms: &[String], k: usize, seed: u64) -> Result<Vec<BwsTuple>> {
    let n = terms.len();
    if n < TUPLE_SIZE {
        return Err(Error::Argument(format!("need at least {TUPLE_SIZE} terms, got {n}")));
    }
    if k == 0 {
        return Err(Error::Argument("tuples-per-term must be at least 1".into()));
    }
    let distinct: HashSet<&String> = terms.iter().collect();
    if distinct.len() != n {
        return Err(Error::Argument("terms must be distinct".into()));
    }
    let count = (k * n).div_ceil(TUPLE_SIZE);
    if (count as f64) > binomial4(n) {
        return Err(Error::Argument(format!(
            "{count} distinct 4-tuples requested but only {} exist for {n} terms",
            binomial4(n)
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _restart in 0..64 {
        let mut slots = Vec::with_capacity(count * TUPLE_SIZE);
        for _ in 0..k {
            let mut round: Vec<usize> = (0..n).collect();
            round.shuffle(&mut rng);
            slots.extend(round);
        }
        let pad = count * TUPLE_SIZE - slots.len();
        if pad > 0 {
            let mut round: Vec<usize> = (0..n).collect();
            round.shuffle(&mut rng);
            slots.extend(&round[..pad]);
        }
        if repair(&mut slots, count, &mut rng) {
            let width = count.to_string().len().max(4);
            return Ok(slots
                .chunks(TUPLE_SIZE)
                .enumerate()
                .map(|(i, c)| BwsTuple {
                    id: format!("t{:0width$}", i + 1),
                    items: [0, 1, 2, 3].map(|j| terms[c[j]].clone()),
                })
                .collect());
        }
    }
    Err(Error::Argument(format!(
        "could not find a duplicate-free design for {n} terms with k={k}"
    )))
}

fn binomial4(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) * (n - 2.0) * (n - 3.0) / 24.0
}

fn has_repeat(chunk: &[usize]) -> Option<usize> {
    (1..chunk.len()).find(|&j| chunk[..j].contains(&chunk[j]))
}

fn sorted_key(chunk: &[usize]) -> [usize; TUPLE_SIZE] {
    let mut key = [chunk[0], chunk[1], chunk[2], chunk[3]];
    key.sort_unstable();
    key
}

/// Swaps slots until no chunk repeats an item and no two chunks are set-equal.
fn repair(slots: &mut [usize], count: usize, rng: &mut ChaCha8Rng) -> bool {
    let budget = 200 * count + 1000;
    for _ in 0..budget {
        let mut seen = HashSet::with_capacity(count);
        let mut bad = None;
        for c in 0..count {
            let chunk = &slots[c * TUPLE_SIZE..(c + 1) * TUPLE_SIZE];
            if let Some(p) = has_repeat(chunk) {
                bad = Some((c, p));
                break;
            }
            if !seen.insert(sorted_key(chunk)) {
                bad = Some((c, rng.random_range(0..TUPLE_SIZE)));
                break;
            }
        }
        let Some((c, p)) = bad else {
            return true;
        };
        if count == 1 {
            return false;
        }
        let mut d = rng.random_range(0..count - 1);
        if d >= c {
            d += 1;
        }
        let q = rng.random_range(0..TUPLE_SIZE);
        let (a, b) = (c * TUPLE_SIZE + p, d * TUPLE_SIZE + q);
        slots.swap(a, b);
        let clean = has_repeat(&slots[c * TUPLE_SIZE..(c + 1) * TUPLE_SIZE]).is_none()
            && has_repeat(&slots[d * TUPLE_SIZE..(d + 1) * TUPLE_SIZE]).is_none();
        if !clean {
            slots.swap(a, b);
        }
    }
    false
}

fn index_tuples(tuples: &[BwsTuple]) -> Result<HashMap<&str, &BwsTuple>> {
    let mut by_id = HashMap::with_capacity(tuples.len());
    for t in tuples {
        t.validate()?;
        if by_id.insert(t.id.as_str(), t).is_some() {
            return Err(Error::Validation(format!("duplicate tuple id {}", t.id)));
        }
    }
    Ok(by_id)
}

fn validate_responses<'a>(
    responses: &[BwsResponse],
    by_id: &HashMap<&str, &'a BwsTuple>,
) -> Result<Vec<&'a BwsTuple>> {
    let mut problems = Vec::new();
    let mut resolved = Vec::with_capacity(responses.len());
    for (i, r) in responses.iter().enumerate() {
        match by_id.get(r.tuple_id.as_str()) {
            None => problems.push(format!(
                "response #{} ({}): unknown tuple {}",
                i + 1,
                r.annotator,
                r.tuple_id
            )),
            Some(t) => match r.check_against(t) {
                Ok(()) => resolved.push(*t),
                Err(msg) => problems.push(format!("response #{} ({}): {msg}", i + 1, r.annotator)),
            },
        }
    }
    if problems.is_empty() {
        Ok(resolved)
    } else {
        Err(Error::Validation(problems.join("; ")))
    }
}

/// Counting-procedure scores: `(best - worst) / appearances`.
pub fn score(responses: &[BwsResponse], tuples: &[BwsTuple]) -> Result<BwsScoreTable> {
    let by_id = index_tuples(tuples)?;
    let resolved = validate_responses(responses, &by_id)?;
    let mut tally: BTreeMap<String, (u32, u32, u32)> = BTreeMap::new();
    for (r, t) in responses.iter().zip(resolved) {
        for item in &t.items {
            let e = tally.entry(item.clone()).or_default();
            e.2 += 1;
            if *item == r.best {
                e.0 += 1;
            }
            if *item == r.worst {
                e.1 += 1;
            }
        }
    }
    let terms = tally
        .into_iter()
        .map(|(term, (best, worst, appearances))| {
            // one rounding, so equal ratios give equal scores
            let score = (best as f64 - worst as f64) / appearances as f64;
            (
                term,
                TermScore {
                    best,
                    worst,
                    appearances,
                    score,
                },
            )
        })
        .collect();
    Ok(BwsScoreTable { terms })
}

/// Share of best-slot and worst-slot answers that match their tuple's
/// majority answer, pooled over both slots. Every option tied for the top
/// count is a majority answer.
pub fn agreement(responses: &[BwsResponse], tuples: &[BwsTuple]) -> Result<f64> {
    if responses.is_empty() {
        return Err(Error::Argument("agreement needs at least one response".into()));
    }
    let by_id = index_tuples(tuples)?;
    validate_responses(responses, &by_id)?;

    // tuple id -> (best counts, worst counts)
    type Votes<'a> = (HashMap<&'a str, u32>, HashMap<&'a str, u32>);
    let mut per_tuple: BTreeMap<&str, Votes> = BTreeMap::new();
    for r in responses {
        let slot = per_tuple.entry(r.tuple_id.as_str()).or_default();
        *slot.0.entry(r.best.as_str()).or_default() += 1;
        *slot.1.entry(r.worst.as_str()).or_default() += 1;
    }
    let majority_share = |counts: &HashMap<&str, u32>| -> u32 {
        let top = counts.values().copied().max().unwrap_or(0);
        counts.values().filter(|&&c| c == top).sum()
    };
    let matched: u32 = per_tuple
        .values()
        .map(|(b, w)| majority_share(b) + majority_share(w))
        .sum();
    Ok(matched as f64 / (2 * responses.len()) as f64)
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in io::open_reader(path)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v = serde_json::from_str(&line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        out.push(v);
    }
    Ok(out)
}

fn to_jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for it in items {
        out.push_str(&serde_json::to_string(it)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn read_tuples(path: &Path) -> Result<Vec<BwsTuple>> {
    let tuples: Vec<BwsTuple> = read_jsonl(path)?;
    index_tuples(&tuples)?;
    Ok(tuples)
}

pub fn write_tuples(path: &Path, tuples: &[BwsTuple]) -> Result<()> {
    io::write_atomic(path, tuples_to_jsonl(tuples)?.as_bytes())
}

pub fn tuples_to_jsonl(tuples: &[BwsTuple]) -> Result<String> {
    to_jsonl(tuples)
}

pub fn read_responses(path: &Path) -> Result<Vec<BwsResponse>> {
    read_jsonl(path)
}

pub fn write_responses(path: &Path, responses: &[BwsResponse]) -> Result<()> {
    io::write_atomic(path, to_jsonl(responses)?.as_bytes())
}

/// Outcome of appending to a [`ResponseLog`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AppendOutcome {
    Appended,
    /// The identical response is already logged; nothing was written.
    AlreadyPresent,
}

/// Append-only JSON Lines response store, one answer per (tuple, annotator).
///
/// Each append writes a single line through an `O_APPEND` handle and syncs it
/// before returning. Callers sharing a log across threads wrap it in a mutex.
#[derive(Debug)]
pub struct ResponseLog {
    path: PathBuf,
    file: File,
    responses: Vec<BwsResponse>,
    by_key: HashMap<(String, String), usize>,
}

impl ResponseLog {
    /// Opens (creating if needed) the log at `path` and replays its contents.
    pub fn open(path: &Path) -> Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let responses: Vec<BwsResponse> = read_jsonl(path)?;
        let mut by_key = HashMap::with_capacity(responses.len());
        for (i, r) in responses.iter().enumerate() {
            if by_key
                .insert((r.tuple_id.clone(), r.annotator.clone()), i)
                .is_some()
            {
                return Err(Error::parse(
                    path,
                    i + 1,
                    format!("duplicate response by {} to {}", r.annotator, r.tuple_id),
                ));
            }
        }
        Ok(ResponseLog {
            path: path.to_path_buf(),
            file,
            responses,
            by_key,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn responses(&self) -> &[BwsResponse] {
        &self.responses
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn find(&self, tuple_id: &str, annotator: &str) -> Option<&BwsResponse> {
        self.by_key
            .get(&(tuple_id.to_string(), annotator.to_string()))
            .map(|&i| &self.responses[i])
    }

    /// Appends `response`. A second, different answer from the same annotator
    /// to the same tuple is rejected; an identical resubmission is a no-op.
    pub fn append(&mut self, response: BwsResponse) -> Result<AppendOutcome> {
        let key = (response.tuple_id.clone(), response.annotator.clone());
        if let Some(&i) = self.by_key.get(&key) {
            let prev = &self.responses[i];
            if prev.best == response.best && prev.worst == response.worst {
                return Ok(AppendOutcome::AlreadyPresent);
            }
            return Err(Error::Validation(format!(
                "{} already answered tuple {}",
                response.annotator, response.tuple_id
            )));
        }
        let mut line = serde_json::to_string(&response)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.sync_data()?;
        self.by_key.insert(key, self.responses.len());
        self.responses.push(response);
        Ok(AppendOutcome::Appended)
    }
}
