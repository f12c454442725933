//! HTTP backend for live Best-Worst Scaling annotation.
//!
//! Endpoints (JSON):
//! - `GET /api/campaign`: campaign name, size, quota, expiry
//! - `GET /api/next?annotator=ID[&campaign=NAME]`: `{"tuple": {...} | null}`
//! - `POST /api/response`: body `{tuple_id, annotator, best, worst[, timestamp]}`
//! - `GET /api/progress[?annotator=ID]`
//! - `GET /api/scores`: the counting-procedure table over the current log
//!
//! Everything else is served from the optional static UI directory.

mod campaign;
mod http;

pub use campaign::{
    Assignment, AssignmentState, Campaign, CampaignConfig, CampaignInfo, Progress, Submitted, DEFAULT_EXPIRY_SECS,
    DEFAULT_QUOTA,
};
pub use http::{router, serve, AppState, Clock, ResponsePayload};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("invalid request: {0}")]
    Validation(String),
    #[error("conflict: {0}")]
    Conflict(String),
    #[error(transparent)]
    Core(#[from] polcomp_core::Error),
}
