//! HTTP API.
//!
//! | method | path | success | errors |
//! |---|---|---|---|
//! | POST | `/sessions` `{seed_word}` | 201 `{id}` | 422 bad seed |
//! | GET | `/sessions/{id}` | 200 session state | 404 |
//! | GET | `/sessions/{id}/next` | 200 `{word}` or `{complete:true}` | 404 |
//! | POST | `/sessions/{id}/definitions` `{word,tokens}` | 200 session state | 404, 409 wrong word, 422 empty |
//! | GET | `/sessions/{id}/export` | 200 lexicon JSONL | 404, 409 incomplete |
//! | GET | `/sessions/{id}/analysis` | 200 summary | 404, 409 incomplete |
//!
//! Error bodies are `{"error": message}`. Anything else is served from the
//! static directory when one is configured.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::analysis::analyze_lexicon;
use crate::session::GameError;
use crate::store::SessionStore;

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
    /// Solver budget for `/analysis`.
    pub analysis_budget: Duration,
}

impl AppState {
    pub fn new(store: SessionStore) -> Self {
        AppState {
            store: Arc::new(store),
            analysis_budget: Duration::from_secs(30),
        }
    }
}

pub struct ApiError(GameError);

impl From<GameError> for ApiError {
    fn from(e: GameError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            GameError::InvalidSeed | GameError::EmptyDefinition(_) | GameError::TooLong { .. } => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            GameError::OutOfSequence { .. } | GameError::Incomplete => StatusCode::CONFLICT,
            GameError::NotFound(_) => StatusCode::NOT_FOUND,
            GameError::Corrupt(_) | GameError::Storage(_) => {
                tracing::error!(error = %self.0, "request failed");
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        (status, Json(json!({ "error": self.0.to_string() }))).into_response()
    }
}

/// Runs blocking store work off the async executor.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, GameError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(GameError::Storage(e.to_string())))?
        .map_err(ApiError)
}

#[derive(Deserialize)]
struct CreateBody {
    seed_word: String,
}

#[derive(Serialize)]
struct Created {
    id: String,
}

#[derive(Deserialize)]
struct DefinitionBody {
    word: String,
    tokens: Vec<String>,
}

async fn create(State(st): State<AppState>, Json(body): Json<CreateBody>) -> Result<impl IntoResponse, ApiError> {
    let s = blocking(move || st.store.create(&body.seed_word)).await?;
    Ok((StatusCode::CREATED, Json(Created { id: s.id })))
}

async fn session(State(st): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(st.store.get(&id)?))
}

async fn next(State(st): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(st.store.get(&id)?.next_prompt()))
}

async fn define(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<DefinitionBody>,
) -> Result<impl IntoResponse, ApiError> {
    let s = blocking(move || st.store.submit(&id, &body.word, &body.tokens)).await?;
    Ok(Json(s))
}

async fn export(State(st): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let s = st.store.get(&id)?;
    let lex = s.export_lexicon(st.store.rules())?;
    let mut body = Vec::new();
    lex.write_jsonl(&mut body)
        .map_err(|e| ApiError(GameError::Storage(e.to_string())))?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body))
}

async fn analysis(State(st): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let s = st.store.get(&id)?;
    let lex = s.export_lexicon(st.store.rules())?;
    let budget = st.analysis_budget;
    let report = blocking(move || analyze_lexicon(&lex, budget)).await?;
    Ok(Json(report))
}

pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(session))
        .route("/sessions/{id}/next", get(next))
        .route("/sessions/{id}/definitions", post(define))
        .route("/sessions/{id}/export", get(export))
        .route("/sessions/{id}/analysis", get(analysis))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, state: AppState, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "game service listening");
    axum::serve(listener, router(state, static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
