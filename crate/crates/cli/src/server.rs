//! HTTP+JSON session service. Sessions live in memory; writes to one
//! session are serialized by its lock, reads share it.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderName, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use overlap_boost::datasets::iris;
use overlap_boost::rules::{boost, to_generalized_dt};
use overlap_boost::session::{Action, Session, SessionConfig};
use overlap_boost::{CaseId, ClassLabel, Dataset, Error, OverlapWeights};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::RwLock;

pub const REVISION_HEADER: &str = "x-session-revision";

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<BTreeMap<String, Arc<RwLock<Session>>>>>,
    next_id: Arc<AtomicU64>,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/session", post(create_session))
        .route("/session/{id}/state", get(get_state))
        .route("/session/{id}/data", get(get_data))
        .route("/session/{id}/action", post(post_action))
        .route("/session/{id}/scores", get(get_scores))
        .route("/session/{id}/overlap", get(get_overlap))
        .route("/session/{id}/export", get(get_export))
        .with_state(state)
}

pub async fn serve(host: &str, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::default())).await
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    BadRequest(String),
    Conflict { current: u64, requested: u64 },
    Impure { label: String, offending: Vec<CaseId>, revision: u64 },
    Rejected { message: String, revision: u64 },
}

impl ApiError {
    fn from_core(e: Error, revision: u64) -> Self {
        match e {
            Error::StaleRevision { current, requested } => ApiError::Conflict { current, requested },
            Error::ImpureRectangle { label, offending } => ApiError::Impure { label, offending, revision },
            other => ApiError::Rejected { message: other.to_string(), revision },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, revision, body) = match self {
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, None, json!({ "error": m })),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, None, json!({ "error": m })),
            ApiError::Conflict { current, requested } => (
                StatusCode::CONFLICT,
                Some(current),
                json!({ "error": "stale revision", "revision": current, "requested": requested }),
            ),
            ApiError::Impure { label, offending, revision } => (
                StatusCode::UNPROCESSABLE_ENTITY,
                Some(revision),
                json!({ "error": format!("rectangle for `{label}` is not pure"), "offending": offending, "revision": revision }),
            ),
            ApiError::Rejected { message, revision } => {
                (StatusCode::UNPROCESSABLE_ENTITY, Some(revision), json!({ "error": message, "revision": revision }))
            }
        };
        with_revision((status, Json(body)).into_response(), revision)
    }
}

fn with_revision(mut response: Response, revision: Option<u64>) -> Response {
    if let Some(r) = revision {
        response.headers_mut().insert(HeaderName::from_static(REVISION_HEADER), HeaderValue::from(r));
    }
    response
}

/// JSON body with the revision merged in and echoed as a header.
fn revised(revision: u64, body: Value) -> Response {
    let mut body = body;
    if let Value::Object(map) = &mut body {
        map.insert("revision".into(), revision.into());
    }
    with_revision(Json(body).into_response(), Some(revision))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("response serializes")
}

async fn lookup(state: &AppState, id: &str) -> Result<Arc<RwLock<Session>>, ApiError> {
    state.sessions.read().await.get(id).cloned().ok_or_else(|| ApiError::NotFound(format!("no session `{id}`")))
}

fn default_true() -> bool {
    true
}

fn default_label() -> String {
    "class".into()
}

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    /// CSV text. The built-in Iris data when absent.
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default = "default_label")]
    pub label: String,
    #[serde(default = "default_true")]
    pub normalize: bool,
    #[serde(default)]
    pub classes: Vec<ClassLabel>,
    #[serde(default)]
    pub seed: u64,
    /// Actions replayed onto the new session.
    #[serde(default)]
    pub log: Vec<Action>,
}

async fn create_session(State(state): State<AppState>, Json(req): Json<CreateSession>) -> Result<Response, ApiError> {
    let base = match &req.csv {
        Some(text) => {
            Dataset::load_csv(text.as_bytes(), &req.label).map_err(|e| ApiError::BadRequest(e.to_string()))?
        }
        None => iris(),
    };
    let config = SessionConfig { normalize: req.normalize, classes: req.classes, seed: req.seed };
    let id = format!("s{}", state.next_id.fetch_add(1, Ordering::SeqCst) + 1);
    let session =
        Session::replay(id.clone(), base, config, &req.log).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let revision = session.revision();
    let cases = session.state().working.len();
    state.sessions.write().await.insert(id.clone(), Arc::new(RwLock::new(session)));
    let mut response = revised(revision, json!({ "session_id": id, "cases": cases }));
    *response.status_mut() = StatusCode::CREATED;
    Ok(response)
}

async fn get_state(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = lookup(&state, &id).await?;
    let s = session.read().await;
    Ok(revised(
        s.revision(),
        json!({
            "session_id": s.id,
            "undo_depth": s.undo_depth(),
            "log_length": s.log().len(),
            "state": to_value(s.state()),
        }),
    ))
}

#[derive(Debug, Deserialize)]
pub struct DataQuery {
    #[serde(default)]
    pub normalized: Option<bool>,
}

async fn get_data(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<DataQuery>,
) -> Result<Response, ApiError> {
    let session = lookup(&state, &id).await?;
    let s = session.read().await;
    let st = s.state();
    let working = &st.working;
    let normalized = q.normalized.unwrap_or(st.normalized);
    let view = match (normalized, working.norm_meta().is_some()) {
        (true, true) | (false, false) => working.clone(),
        (false, true) => working.denormalize(),
        (true, false) => working.minmax_normalize().map_err(|e| ApiError::from_core(e, s.revision()))?,
    };
    let remaining: Vec<bool> = view.case_ids().iter().map(|id| st.remaining.contains(id)).collect();
    Ok(revised(
        s.revision(),
        json!({
            "normalized": normalized,
            "attributes": view.attributes(),
            "axis_order": st.axis_order,
            "case_ids": view.case_ids(),
            "cases": view.cases(),
            "labels": view.labels(),
            "remaining": remaining,
            "hidden_classes": st.hidden_classes,
        }),
    ))
}

#[derive(Debug, Deserialize)]
pub struct ActionRequest {
    pub revision: u64,
    pub action: Action,
}

async fn post_action(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<ActionRequest>,
) -> Result<Response, ApiError> {
    let session = lookup(&state, &id).await?;
    let mut s = session.write().await;
    let current = s.revision();
    let diff = s.apply_at(req.revision, req.action).map_err(|e| ApiError::from_core(e, current))?;
    Ok(revised(s.revision(), json!({ "diff": to_value(&diff) })))
}

async fn get_scores(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = lookup(&state, &id).await?;
    let s = session.read().await;
    Ok(revised(s.revision(), json!({ "scorer": s.state().scorer, "scores": s.state().scores })))
}

async fn get_overlap(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = lookup(&state, &id).await?;
    let s = session.read().await;
    Ok(revised(s.revision(), json!({ "overlap": s.state().overlap })))
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    #[default]
    DecisionList,
    Boosted,
    RulesText,
    /// Newline-delimited JSON action log.
    Log,
}

#[derive(Debug, Deserialize)]
pub struct ExportQuery {
    #[serde(default)]
    pub format: ExportFormat,
}

async fn get_export(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<ExportQuery>,
) -> Result<Response, ApiError> {
    let session = lookup(&state, &id).await?;
    let s = session.read().await;
    let revision = s.revision();
    let text = |content_type: &'static str, body: String| {
        with_revision(([(header::CONTENT_TYPE, content_type)], body).into_response(), Some(revision))
    };
    Ok(match q.format {
        ExportFormat::DecisionList => revised(revision, json!({ "decision_list": to_value(&s.decision_list()) })),
        ExportFormat::Boosted => {
            let f1 = s.state().scorer.clone().ok_or_else(|| ApiError::Rejected {
                message: "no scorer set; apply set_scorer first".into(),
                revision,
            })?;
            let model = boost(&s.state().working, f1, OverlapWeights::default())
                .map_err(|e| ApiError::from_core(e, revision))?;
            revised(revision, json!({ "boosted": to_value(&model), "parameter_count": model.parameter_count() }))
        }
        ExportFormat::RulesText => {
            let list = s.decision_list();
            text(
                "text/plain; charset=utf-8",
                format!("{}\n{}", list.render_text(), to_generalized_dt(&list).render_text()),
            )
        }
        ExportFormat::Log => text("application/x-ndjson", s.log_ndjson()),
    })
}
