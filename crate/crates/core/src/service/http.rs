use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;

use super::{HumanMove, ServiceError, SessionConfig, SessionStore};

#[derive(Debug, Serialize)]
struct ErrorBody {
    code: &'static str,
    message: String,
    detail: serde_json::Value,
}

struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        use ServiceError::*;
        let status = match &e {
            InvalidConfig(_) | InvalidMove(_) => StatusCode::BAD_REQUEST,
            UnknownSession(_) => StatusCode::NOT_FOUND,
            NotYourTurn | NotEnginesTurn | GameOver => StatusCode::CONFLICT,
            Illegal(_) | DegenerateResidual { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let detail = match &e {
            Illegal(crate::board::Illegality::NotNormalized { norm }) => serde_json::json!({ "norm": norm }),
            Illegal(crate::board::Illegality::NotOrthogonal { index, player, overlap }) => {
                serde_json::json!({ "index": index, "player": player, "overlap": overlap })
            }
            DegenerateResidual { norm } => serde_json::json!({ "norm": norm }),
            UnknownSession(id) => serde_json::json!({ "id": id }),
            _ => serde_json::Value::Null,
        };
        ApiError { status, body: ErrorBody { code: e.code(), message: e.to_string(), detail } }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody { code: "invalid_request", message: e.body_text(), detail: serde_json::Value::Null },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type Store = Arc<SessionStore>;

/// Runs blocking store work (engine moves can take a while) off the async workers.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ServiceError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::from(ServiceError::Storage(format!("worker failed: {e}"))))?
        .map_err(ApiError::from)
}

async fn create_game(
    State(store): State<Store>,
    body: Result<Json<SessionConfig>, JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let Json(config) = body?;
    let session = blocking(move || store.create(&config)).await?;
    Ok((StatusCode::CREATED, Json(session.view())))
}

async fn get_game(State(store): State<Store>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(store.get(&id)?.view()))
}

async fn human_move(
    State(store): State<Store>,
    Path(id): Path<String>,
    body: Result<Json<HumanMove>, JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let Json(mv) = body?;
    let session = blocking(move || store.update(&id, |s| s.submit_human_move(&mv))).await?;
    Ok(Json(session.view()))
}

async fn engine_move(State(store): State<Store>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let session = blocking(move || store.update(&id, |s| s.engine_move())).await?;
    Ok(Json(session.view()))
}

async fn analysis(State(store): State<Store>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let session = store.get(&id)?;
    let analysis = blocking(move || Ok(session.analysis())).await?;
    Ok(Json(analysis))
}

async fn healthz(State(store): State<Store>) -> impl IntoResponse {
    Json(serde_json::json!({ "status": "ok", "sessions": store.len() }))
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/games", post(create_game))
        .route("/games/{id}", get(get_game))
        .route("/games/{id}/moves", post(human_move))
        .route("/games/{id}/engine-move", post(engine_move))
        .route("/games/{id}/analysis", get(analysis))
        .with_state(store)
}

/// Serves until ctrl-c.
pub async fn serve(addr: SocketAddr, store: Arc<SessionStore>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
