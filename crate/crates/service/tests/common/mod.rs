//! In-process HTTP helpers shared by the service test targets.
#![allow(dead_code)]

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use eyedoc_service::{router, AppState, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

/// Router whose session ids are `s1`, `s2`, ...
pub fn test_router(config: ServiceConfig) -> (Router, Arc<AppState>) {
    let counter = Arc::new(AtomicU64::new(0));
    let ids = Arc::new(move || format!("s{}", counter.fetch_add(1, Ordering::Relaxed) + 1));
    let state = Arc::new(AppState::with_id_generator(config, ids));
    (router(Arc::clone(&state)), state)
}

pub async fn call(app: &Router, method: &str, path: &str, body: Option<&Value>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(path);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(serde_json::to_vec(v).unwrap())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

pub async fn call_json(app: &Router, method: &str, path: &str, body: Option<&Value>) -> (StatusCode, Value) {
    let (status, bytes) = call(app, method, path, body).await;
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, v)
}

/// Runs one golden fixture against a fresh router. Returns the first mismatch.
pub async fn run_fixture(fixture: &Value) -> Result<usize, String> {
    let (app, _state) = test_router(ServiceConfig::default());
    let steps = fixture["steps"].as_array().ok_or("fixture without steps")?;
    for (i, step) in steps.iter().enumerate() {
        let req = &step["request"];
        let method = req["method"].as_str().unwrap();
        let path = req["path"].as_str().unwrap();
        let body = req.get("body");
        let (status, bytes) = call(&app, method, path, body).await;
        let want = &step["response"];
        let want_status = want["status"].as_u64().unwrap();
        if u64::from(status.as_u16()) != want_status {
            return Err(format!(
                "step {i} {method} {path}: status {} != {want_status}; body {}",
                status.as_u16(),
                String::from_utf8_lossy(&bytes)
            ));
        }
        if let Some(text) = want.get("text") {
            if text.as_str().unwrap().as_bytes() != bytes.as_slice() {
                return Err(format!("step {i} {method} {path}: text body differs:\n{}", String::from_utf8_lossy(&bytes)));
            }
        } else if let Some(expected) = want.get("body") {
            let got: Value = serde_json::from_slice(&bytes).map_err(|e| format!("step {i}: body is not JSON: {e}"))?;
            // compare the canonical encodings so 1 and 1.0 differ
            if serde_json::to_string(&got).unwrap() != serde_json::to_string(expected).unwrap() {
                return Err(format!("step {i} {method} {path}:\n  got  {got}\n  want {expected}"));
            }
        } else if !bytes.is_empty() {
            return Err(format!("step {i} {method} {path}: expected empty body, got {}", String::from_utf8_lossy(&bytes)));
        }
    }
    Ok(steps.len())
}
