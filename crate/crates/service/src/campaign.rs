//! Campaign state: tuple dispensing, assignment tracking and response intake.
//!
//! All state other than open assignments is derived from the tuples file and
//! the append-only response log, so reopening both reproduces it.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use chrono::{DateTime, Duration, Utc};
use polcomp_core::bws::{self, AppendOutcome, BwsResponse, BwsScoreTable, BwsTuple, ResponseLog};
use serde::{Deserialize, Serialize};

use crate::ServiceError;

/// Per-tuple response target.
pub const DEFAULT_QUOTA: usize = 8;

/// Time after which an unanswered assignment returns to the pool.
pub const DEFAULT_EXPIRY_SECS: i64 = 600;

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub name: String,
    pub quota: usize,
    pub expiry: Duration,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            name: "default".into(),
            quota: DEFAULT_QUOTA,
            expiry: Duration::seconds(DEFAULT_EXPIRY_SECS),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssignmentState {
    Open,
    Answered,
    Expired,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub tuple_id: String,
    pub annotator: String,
    pub issued_at: DateTime<Utc>,
    pub state: AssignmentState,
}

/// Outcome of a submission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Submitted {
    Accepted,
    /// Identical to an already logged response; nothing was written.
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annotator: Option<String>,
    /// Tuples answered by `annotator` (0 when no annotator was given).
    pub answered: usize,
    pub total_tuples: usize,
    pub campaign_responses: usize,
    pub campaign_target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignInfo {
    pub name: String,
    pub tuples: usize,
    pub quota: usize,
    pub expiry_secs: i64,
    pub responses: usize,
}

#[derive(Debug)]
pub struct Campaign {
    config: CampaignConfig,
    tuples: Vec<BwsTuple>,
    index: HashMap<String, usize>,
    log: ResponseLog,
    answers: Vec<usize>,
    answered_by: HashMap<String, HashSet<usize>>,
    /// At most one per annotator.
    open: BTreeMap<String, Assignment>,
}

impl Campaign {
    /// Loads the tuples and replays the response log at `log_path`.
    pub fn open(tuples_path: &Path, log_path: &Path, config: CampaignConfig) -> Result<Self, ServiceError> {
        let tuples = bws::read_tuples(tuples_path)?;
        let log = ResponseLog::open(log_path)?;
        Campaign::from_parts(tuples, log, config)
    }

    pub fn from_parts(tuples: Vec<BwsTuple>, log: ResponseLog, config: CampaignConfig) -> Result<Self, ServiceError> {
        if config.quota == 0 {
            return Err(ServiceError::Validation("quota must be at least 1".into()));
        }
        let index: HashMap<String, usize> = tuples.iter().enumerate().map(|(i, t)| (t.id.clone(), i)).collect();
        let mut answers = vec![0; tuples.len()];
        let mut answered_by: HashMap<String, HashSet<usize>> = HashMap::new();
        for (line, r) in log.responses().iter().enumerate() {
            let &t = index.get(&r.tuple_id).ok_or_else(|| {
                ServiceError::Validation(format!(
                    "{} line {}: unknown tuple {}",
                    log.path().display(),
                    line + 1,
                    r.tuple_id
                ))
            })?;
            r.check_against(&tuples[t])
                .map_err(|e| ServiceError::Validation(format!("{} line {}: {e}", log.path().display(), line + 1)))?;
            answers[t] += 1;
            answered_by.entry(r.annotator.clone()).or_default().insert(t);
        }
        Ok(Campaign {
            config,
            tuples,
            index,
            log,
            answers,
            answered_by,
            open: BTreeMap::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn info(&self) -> CampaignInfo {
        CampaignInfo {
            name: self.config.name.clone(),
            tuples: self.tuples.len(),
            quota: self.config.quota,
            expiry_secs: self.config.expiry.num_seconds(),
            responses: self.log.len(),
        }
    }

    pub fn tuples(&self) -> &[BwsTuple] {
        &self.tuples
    }

    pub fn responses(&self) -> &[BwsResponse] {
        self.log.responses()
    }

    /// Logged answers per tuple, in tuple order.
    pub fn answer_counts(&self) -> &[usize] {
        &self.answers
    }

    pub fn open_assignment(&self, annotator: &str) -> Option<&Assignment> {
        self.open.get(annotator)
    }

    fn expire(&mut self, now: DateTime<Utc>) {
        let ttl = self.config.expiry;
        self.open.retain(|_, a| now - a.issued_at < ttl);
    }

    fn has_answered(&self, annotator: &str, t: usize) -> bool {
        self.answered_by.get(annotator).is_some_and(|s| s.contains(&t))
    }

    /// The annotator's open tuple if any, otherwise a new assignment: the
    /// tuple with the fewest answers (ties by id) among those this annotator
    /// has not answered and whose answers plus others' open assignments are
    /// below quota.
    pub fn next_tuple(&mut self, annotator: &str, now: DateTime<Utc>) -> Result<Option<BwsTuple>, ServiceError> {
        if annotator.trim().is_empty() {
            return Err(ServiceError::Validation("annotator must be non-empty".into()));
        }
        self.expire(now);
        if let Some(a) = self.open.get(annotator) {
            return Ok(Some(self.tuples[self.index[&a.tuple_id]].clone()));
        }
        let mut pending = vec![0usize; self.tuples.len()];
        for a in self.open.values() {
            pending[self.index[&a.tuple_id]] += 1;
        }
        let pick = (0..self.tuples.len())
            .filter(|&t| !self.has_answered(annotator, t) && self.answers[t] + pending[t] < self.config.quota)
            .min_by(|&a, &b| {
                self.answers[a]
                    .cmp(&self.answers[b])
                    .then_with(|| self.tuples[a].id.cmp(&self.tuples[b].id))
            });
        let Some(t) = pick else { return Ok(None) };
        let tuple = self.tuples[t].clone();
        self.open.insert(
            annotator.to_string(),
            Assignment {
                tuple_id: tuple.id.clone(),
                annotator: annotator.to_string(),
                issued_at: now,
                state: AssignmentState::Open,
            },
        );
        Ok(Some(tuple))
    }

    /// Validates `response` against its tuple and the annotator's open
    /// assignment, then appends it to the log and closes the assignment.
    pub fn submit(&mut self, response: BwsResponse, now: DateTime<Utc>) -> Result<Submitted, ServiceError> {
        let &t = self
            .index
            .get(&response.tuple_id)
            .ok_or_else(|| ServiceError::Validation(format!("unknown tuple {}", response.tuple_id)))?;
        response
            .check_against(&self.tuples[t])
            .map_err(ServiceError::Validation)?;
        if let Some(prev) = self.log.find(&response.tuple_id, &response.annotator) {
            if prev.best == response.best && prev.worst == response.worst {
                return Ok(Submitted::Duplicate);
            }
            return Err(ServiceError::Conflict(format!(
                "{} already answered tuple {} differently",
                response.annotator, response.tuple_id
            )));
        }
        self.expire(now);
        match self.open.get(&response.annotator) {
            Some(a) if a.tuple_id == response.tuple_id => {}
            Some(a) => {
                return Err(ServiceError::Conflict(format!(
                    "{} is assigned tuple {}, not {}",
                    response.annotator, a.tuple_id, response.tuple_id
                )))
            }
            None => {
                return Err(ServiceError::Conflict(format!(
                    "{} has no open assignment for tuple {} (expired or never issued)",
                    response.annotator, response.tuple_id
                )))
            }
        }
        let annotator = response.annotator.clone();
        match self.log.append(response)? {
            AppendOutcome::Appended => {}
            AppendOutcome::AlreadyPresent => return Ok(Submitted::Duplicate),
        }
        self.answers[t] += 1;
        self.answered_by.entry(annotator.clone()).or_default().insert(t);
        self.open.remove(&annotator);
        Ok(Submitted::Accepted)
    }

    pub fn progress(&self, annotator: Option<&str>) -> Progress {
        Progress {
            annotator: annotator.map(str::to_string),
            answered: annotator
                .and_then(|a| self.answered_by.get(a))
                .map_or(0, HashSet::len),
            total_tuples: self.tuples.len(),
            campaign_responses: self.log.len(),
            campaign_target: self.tuples.len() * self.config.quota,
        }
    }

    /// Counting-procedure scores over the current log.
    pub fn scores(&self) -> Result<BwsScoreTable, ServiceError> {
        Ok(bws::score(self.log.responses(), &self.tuples)?)
    }
}
