//! HTTP handlers. Bodies are decoded by hand so that malformed JSON maps onto
//! the protocol's error codes rather than the framework's rejections.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, RawQuery, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use eyedoc_core::session::PAGE_SIZE;
use eyedoc_core::{GazeSample, InteractionConfig, PipelineConfig, SessionError, SessionSpec, TargetsPayload};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use crate::error::ApiError;
use crate::state::AppState;

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    let cors = cors_layer(&state.config.cors_allow_origin);
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", axum::routing::delete(delete_session))
        .route("/sessions/{id}/events", get(poll_events))
        .route("/sessions/{id}/targets", put(put_targets))
        .route("/sessions/{id}/gaze", post(push_gaze))
        .route("/sessions/{id}/config", axum::routing::patch(update_config))
        .route("/sessions/{id}/export", get(export_log))
        .layer(cors)
        .with_state(state)
}

fn cors_layer(origins: &[String]) -> CorsLayer {
    let base = CorsLayer::new()
        .allow_methods([Method::GET, Method::POST, Method::PUT, Method::PATCH, Method::DELETE])
        .allow_headers([header::CONTENT_TYPE]);
    if origins.iter().any(|o| o == "*") {
        return base.allow_origin(Any);
    }
    let list: Vec<HeaderValue> = origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()).collect();
    base.allow_origin(AllowOrigin::list(list))
}

async fn healthz() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

fn parse_json<T: DeserializeOwned>(body: &[u8], err: fn(String) -> SessionError) -> Result<T, SessionError> {
    serde_json::from_slice(body).map_err(|e| err(e.to_string()))
}

/// Overlays the keys of `patch` on `base` (one level deep) and decodes the result.
fn merged<T: Serialize + DeserializeOwned>(base: &T, patch: Option<Value>) -> Result<T, SessionError> {
    let mut obj = match serde_json::to_value(base).expect("config serializes") {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    match patch {
        None | Some(Value::Null) => {}
        Some(Value::Object(m)) => obj.extend(m),
        Some(other) => return Err(SessionError::InvalidConfig(format!("expected an object, got {other}"))),
    }
    serde_json::from_value(Value::Object(obj)).map_err(|e| SessionError::InvalidConfig(e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateBody {
    #[serde(default)]
    pipeline: Option<Value>,
    #[serde(default)]
    interaction: Option<Value>,
    source: Value,
    #[serde(default)]
    log: Option<Value>,
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let body: CreateBody = parse_json(&body, SessionError::InvalidConfig)?;
    let pipeline: PipelineConfig = merged(&state.config.pipeline, body.pipeline)?;
    let interaction: InteractionConfig = merged(&state.config.interaction, body.interaction)?;
    let source = serde_json::from_value(body.source).map_err(|e| SessionError::InvalidConfig(e.to_string()))?;
    let log = match body.log {
        Some(v) => serde_json::from_value(v).map_err(|e| SessionError::InvalidConfig(e.to_string()))?,
        None => Default::default(),
    };
    let spec = SessionSpec { pipeline, interaction, source, log };
    let state = Arc::clone(&state);
    // tracker sources connect synchronously
    let id = tokio::task::spawn_blocking(move || state.create(spec)).await.expect("create task")?;
    Ok((StatusCode::CREATED, Json(json!({"id": id}))))
}

/// `since` defaults to 0; anything but a non-negative integer is rejected.
fn since_param(query: Option<&str>) -> Option<u64> {
    let value = query.into_iter().flat_map(|q| q.split('&')).find_map(|pair| pair.strip_prefix("since="));
    match value {
        None => Some(0),
        Some(v) => v.parse().ok(),
    }
}

async fn poll_events(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    RawQuery(query): RawQuery,
) -> ApiResult<impl IntoResponse> {
    let handle = state.get(&id)?;
    let since = since_param(query.as_deref())
        .ok_or_else(|| SessionError::SchemaError("since must be a non-negative integer".into()))?;
    let page = handle.log.poll(since, PAGE_SIZE).map_err(SessionError::from)?;
    handle.start();
    Ok(Json(page))
}

async fn put_targets(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let handle = state.get(&id)?;
    let payload: TargetsPayload = parse_json(&body, SessionError::SchemaError)?;
    let generation = handle.session.lock().put_targets(payload)?;
    Ok(Json(json!({"generation": generation})))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GazeBody {
    samples: Vec<GazeSample>,
}

async fn push_gaze(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let handle = state.get(&id)?;
    let body: GazeBody = parse_json(&body, SessionError::SchemaError)?;
    let accepted = handle.session.lock().push_sim_gaze(&body.samples)?;
    Ok(Json(json!({"accepted": accepted})))
}

async fn update_config(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let handle = state.get(&id)?;
    let patch: Value = parse_json(&body, SessionError::InvalidConfig)?;
    let mut session = handle.session.lock();
    let cfg = merged(session.engine().config(), Some(patch))?;
    session.update_config(cfg)?;
    Ok(Json(json!({"ok": true})))
}

async fn delete_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    tokio::task::spawn_blocking(move || state.remove(&id)).await.expect("delete task")?;
    Ok(StatusCode::NO_CONTENT)
}

async fn export_log(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let handle = state.get(&id)?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], handle.log.export_jsonl()))
}
