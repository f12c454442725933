use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use parking_lot::Mutex;
use polcomp_core::bws::{BwsResponse, BwsTuple};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::campaign::{Campaign, Submitted};
use crate::ServiceError;

pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

#[derive(Clone)]
pub struct AppState {
    pub campaign: Arc<Mutex<Campaign>>,
    pub clock: Clock,
    pub static_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(campaign: Campaign) -> Self {
        AppState {
            campaign: Arc::new(Mutex::new(campaign)),
            clock: Arc::new(Utc::now),
            static_dir: None,
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Validation(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Conflict(_) => StatusCode::CONFLICT,
            ServiceError::Core(e) if e.is_input_error() => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Core(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status == StatusCode::INTERNAL_SERVER_ERROR {
            log::error!("{self}");
        }
        (status, Json(serde_json::json!({ "error": self.to_string() }))).into_response()
    }
}

#[derive(Deserialize)]
struct NextQuery {
    annotator: String,
    campaign: Option<String>,
}

#[derive(Serialize)]
struct NextBody {
    tuple: Option<BwsTuple>,
}

#[derive(Deserialize)]
struct ProgressQuery {
    annotator: Option<String>,
}

/// Submission body; the server stamps the time when it is absent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResponsePayload {
    pub tuple_id: String,
    pub annotator: String,
    pub best: String,
    pub worst: String,
    #[serde(default)]
    pub timestamp: Option<DateTime<Utc>>,
}

#[derive(Serialize)]
struct SubmitBody {
    status: Submitted,
    answered: usize,
}

async fn campaign_info(State(s): State<AppState>) -> Json<crate::CampaignInfo> {
    Json(s.campaign.lock().info())
}

async fn next(State(s): State<AppState>, Query(q): Query<NextQuery>) -> Result<Json<NextBody>, ServiceError> {
    let now = (s.clock)();
    let mut c = s.campaign.lock();
    if let Some(name) = &q.campaign {
        if name != c.name() {
            return Err(ServiceError::NotFound(format!("campaign `{name}`")));
        }
    }
    Ok(Json(NextBody {
        tuple: c.next_tuple(&q.annotator, now)?,
    }))
}

async fn submit(State(s): State<AppState>, Json(p): Json<ResponsePayload>) -> Result<Json<SubmitBody>, ServiceError> {
    let now = (s.clock)();
    let annotator = p.annotator.clone();
    let response = BwsResponse {
        tuple_id: p.tuple_id,
        annotator: p.annotator,
        best: p.best,
        worst: p.worst,
        timestamp: p.timestamp.unwrap_or(now),
    };
    let mut c = s.campaign.lock();
    let status = c.submit(response, now)?;
    Ok(Json(SubmitBody {
        status,
        answered: c.progress(Some(&annotator)).answered,
    }))
}

async fn progress(State(s): State<AppState>, Query(q): Query<ProgressQuery>) -> Json<crate::Progress> {
    Json(s.campaign.lock().progress(q.annotator.as_deref()))
}

async fn scores(State(s): State<AppState>) -> Result<Response, ServiceError> {
    let table = s.campaign.lock().scores()?;
    let body = serde_json::to_string(&table).map_err(polcomp_core::Error::from)?;
    Ok(([(axum::http::header::CONTENT_TYPE, "application/json")], body).into_response())
}

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/api/campaign", get(campaign_info))
        .route("/api/next", get(next))
        .route("/api/response", post(submit))
        .route("/api/progress", get(progress))
        .route("/api/scores", get(scores));
    let app = match &state.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.with_state(state)
}

/// Serves `state` on `addr` until the process is stopped.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("annotation service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
