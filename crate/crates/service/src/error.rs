use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use eyedoc_core::SessionError;
use serde::Serialize;

/// `{"error": code, "detail": text}` with a status derived from the code.
#[derive(Debug)]
pub struct ApiError(pub SessionError);

#[derive(Serialize)]
struct Body<'a> {
    error: &'a str,
    detail: String,
}

pub fn status_for(e: &SessionError) -> StatusCode {
    match e {
        SessionError::UnknownSession(_) => StatusCode::NOT_FOUND,
        SessionError::SourceUnavailable(_) => StatusCode::SERVICE_UNAVAILABLE,
        SessionError::GenerationSkew { .. } | SessionError::WrongSourceKind(_) => StatusCode::CONFLICT,
        SessionError::InvalidConfig(_)
        | SessionError::BadSeq { .. }
        | SessionError::SchemaError(_)
        | SessionError::NonMonotonicTimestamp { .. } => StatusCode::BAD_REQUEST,
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body { error: self.0.code(), detail: self.0.to_string() };
        (status_for(&self.0), Json(body)).into_response()
    }
}
