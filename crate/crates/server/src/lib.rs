//! HTTP/JSON front for the operations in [`bke_core::api`].
//!
//! | method | path          | body → response                       |
//! |--------|---------------|---------------------------------------|
//! | GET    | `/health`     | → `Health`                            |
//! | POST   | `/v1/keygen`  | `KeygenRequest` → `KeygenResponse`    |
//! | POST   | `/v1/expand`  | `ExpandRequest` → `ExpandResponse`    |
//! | POST   | `/v1/encrypt` | `EncryptRequest` → `EncryptResponse`  |
//! | POST   | `/v1/decrypt` | `DecryptRequest` → `DecryptResponse`  |
//! | POST   | `/v1/flows`   | `FlowRequest` → `FlowResponse`        |
//! | POST   | `/v1/bench`   | `BenchRequest` → `BenchResponse`      |
//!
//! Failures come back as an `ApiError` body. Usage errors are 400, crypto
//! and integrity failures 422.
//!
//! The ring arithmetic is CPU-bound, so every operation runs on the blocking
//! pool. Bench requests are serialized so that two timing runs never share
//! the machine.

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use bke_core::api::{self, ApiError, ApiResult, ErrorKind};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tokio::net::TcpListener;
use tokio::sync::Mutex;

/// Large enough for a ciphertext of a few MiB of payload at toy17, which
/// expands about 20× after framing, residues and base64.
pub const BODY_LIMIT: usize = 256 * 1024 * 1024;

#[derive(Clone, Default)]
struct AppState {
    bench_lock: Arc<Mutex<()>>,
}

struct Failure(ApiError);

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        let status = match self.0.kind {
            ErrorKind::Usage => StatusCode::BAD_REQUEST,
            ErrorKind::Crypto | ErrorKind::Integrity => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(self.0)).into_response()
    }
}

async fn blocking<Req, Resp>(
    body: Result<Json<Req>, JsonRejection>,
    op: fn(&Req) -> ApiResult<Resp>,
) -> Result<Json<Resp>, Failure>
where
    Req: DeserializeOwned + Send + 'static,
    Resp: Serialize + Send + 'static,
{
    let Json(req) = body.map_err(|e| Failure(ApiError::usage(e.body_text())))?;
    tokio::task::spawn_blocking(move || op(&req))
        .await
        .map_err(|e| Failure(ApiError::internal(e.to_string())))?
        .map(Json)
        .map_err(|e| {
            tracing::debug!(kind = ?e.kind, "request failed: {}", e.message);
            Failure(e)
        })
}

async fn health() -> Json<api::Health> {
    Json(api::Health::ok())
}

async fn keygen(body: Result<Json<api::KeygenRequest>, JsonRejection>) -> impl IntoResponse {
    blocking(body, api::keygen).await
}

async fn expand(body: Result<Json<api::ExpandRequest>, JsonRejection>) -> impl IntoResponse {
    blocking(body, api::expand).await
}

async fn encrypt(body: Result<Json<api::EncryptRequest>, JsonRejection>) -> impl IntoResponse {
    blocking(body, api::encrypt).await
}

async fn decrypt(body: Result<Json<api::DecryptRequest>, JsonRejection>) -> impl IntoResponse {
    blocking(body, api::decrypt).await
}

async fn flows(body: Result<Json<api::FlowRequest>, JsonRejection>) -> impl IntoResponse {
    blocking(body, api::run_flow).await
}

async fn bench(
    State(state): State<AppState>,
    body: Result<Json<api::BenchRequest>, JsonRejection>,
) -> impl IntoResponse {
    let _guard = state.bench_lock.lock().await;
    blocking(body, api::bench).await
}

pub fn router() -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/v1/keygen", post(keygen))
        .route("/v1/expand", post(expand))
        .route("/v1/encrypt", post(encrypt))
        .route("/v1/decrypt", post(decrypt))
        .route("/v1/flows", post(flows))
        .route("/v1/bench", post(bench))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(AppState::default())
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router())
        .with_graceful_shutdown(shutdown)
        .await
}

/// Binds `addr` and serves in a background task; returns the bound address.
/// Port 0 picks a free port.
pub async fn spawn(addr: SocketAddr) -> std::io::Result<SocketAddr> {
    let listener = TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    tokio::spawn(async move {
        if let Err(e) = serve(listener, std::future::pending()).await {
            tracing::error!("server stopped: {e}");
        }
    });
    Ok(local)
}
