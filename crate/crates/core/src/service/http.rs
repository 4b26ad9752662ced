//! JSON API over [`Service`].
//!
//! | method | path            | body                        |
//! |--------|-----------------|-----------------------------|
//! | POST   | `/api/ask`      | `{question}`                |
//! | POST   | `/api/resolve`  | `{session_id, choice}`      |
//! | GET    | `/api/ontology` | counts and the concept tree |
//! | GET    | `/api/health`   |                             |
//!
//! Pipeline failures come back as `200` with `status: "error"`; refused
//! requests get a 4xx with the same body shape.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response as HttpResponse};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use super::{RequestError, Response, Service};

#[derive(Debug, Deserialize)]
pub struct AskBody {
    pub question: String,
}

#[derive(Debug, Deserialize)]
pub struct ResolveBody {
    pub session_id: String,
    pub choice: usize,
}

fn refused(code: StatusCode, kind: &str, message: String) -> HttpResponse {
    let body = json!({
        "status": "error",
        "error": {"stage": kind, "message": message},
    });
    (code, Json(body)).into_response()
}

impl IntoResponse for RequestError {
    fn into_response(self) -> HttpResponse {
        let (code, kind) = match &self {
            RequestError::EmptyQuestion | RequestError::QuestionTooLong => (StatusCode::BAD_REQUEST, "input"),
            RequestError::UnknownSession(_) => (StatusCode::NOT_FOUND, "session"),
            RequestError::SessionExpired(_) => (StatusCode::GONE, "session"),
            RequestError::NoPendingChoice(_) => (StatusCode::CONFLICT, "session"),
            RequestError::BadChoice { .. } => (StatusCode::BAD_REQUEST, "session"),
        };
        refused(code, kind, self.to_string())
    }
}

fn reply(r: Result<Response, RequestError>) -> HttpResponse {
    match r {
        Ok(body) => Json(body).into_response(),
        Err(e) => e.into_response(),
    }
}

fn bad_body(e: JsonRejection) -> HttpResponse {
    refused(StatusCode::BAD_REQUEST, "input", e.body_text())
}

async fn ask(State(s): State<Arc<Service>>, body: Result<Json<AskBody>, JsonRejection>) -> HttpResponse {
    match body {
        Ok(Json(b)) => reply(s.ask(&b.question)),
        Err(e) => bad_body(e),
    }
}

async fn resolve(State(s): State<Arc<Service>>, body: Result<Json<ResolveBody>, JsonRejection>) -> HttpResponse {
    match body {
        Ok(Json(b)) => reply(s.resolve(&b.session_id, b.choice)),
        Err(e) => bad_body(e),
    }
}

async fn ontology(State(s): State<Arc<Service>>) -> Json<Value> {
    let o = &s.engine().ontology;
    Json(json!({
        "summary": o.summary(),
        "concepts": o.concept_tree(),
    }))
}

async fn health() -> Json<Value> {
    Json(json!({"status": "ok", "version": env!("CARGO_PKG_VERSION")}))
}

/// The API routes, plus static files from `static_dir` for every other path.
pub fn router(service: Arc<Service>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/ask", post(ask))
        .route("/api/resolve", post(resolve))
        .route("/api/ontology", get(ontology))
        .route("/api/health", get(health))
        .with_state(service);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(service: Arc<Service>, static_dir: Option<PathBuf>, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(service, static_dir)).await
}
