//! HTTP evaluation service.
//!
//! | route | body | result |
//! |---|---|---|
//! | `GET /healthz` | | `ok` |
//! | `GET /api/presets` | | every visible preset |
//! | `GET /api/fixtures` | | fixture names |
//! | `GET /api/fixtures/{name}` | | fixture layout document |
//! | `POST /api/evaluate` | [`JobRequest`](crate::io::JobRequest) | point mode |
//! | `POST /api/heatmap` | [`JobRequest`](crate::io::JobRequest) | grid mode |
//! | `POST /api/sweep` | [`JobRequest`](crate::io::JobRequest) | sweep mode |
//! | `POST /api/job` | [`JobRequest`](crate::io::JobRequest) | any mode |
//!
//! Malformed requests get 400, probes that cannot be evaluated
//! (not enclosed, too close to a wall) 422, both with an [`ErrorBody`](crate::io::ErrorBody).
//! Requests are independent; each runs on a blocking thread inside a rayon
//! pool whose size bounds grid parallelism.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use thiserror::Error;
use tower_http::cors::CorsLayer;

use crate::io::fixtures::{fixture_document, FIXTURE_NAMES};
use crate::io::job::{parse_job_request, ErrorClass};
use crate::io::presets::list_presets;
use crate::io::{run_job, JobContext, JobError, JobMode};

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub preset_dir: Option<PathBuf>,
    /// Worker threads for evaluation; `None` uses one per core.
    pub workers: Option<usize>,
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("server error: {0}")]
    Serve(#[from] std::io::Error),
}

#[derive(Clone)]
struct AppState {
    ctx: Arc<JobContext>,
    pool: Arc<rayon::ThreadPool>,
}

pub fn status_of(class: ErrorClass) -> StatusCode {
    match class {
        ErrorClass::Input => StatusCode::BAD_REQUEST,
        ErrorClass::Probe => StatusCode::UNPROCESSABLE_ENTITY,
        ErrorClass::Internal => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

struct ApiError(JobError);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (status_of(self.0.class()), Json(self.0.body())).into_response()
    }
}

impl<E: Into<JobError>> From<E> for ApiError {
    fn from(e: E) -> Self {
        Self(e.into())
    }
}

pub fn router(config: ServiceConfig) -> Result<Router, ServiceError> {
    let mut pool = rayon::ThreadPoolBuilder::new().thread_name(|i| format!("roomgain-eval-{i}"));
    if let Some(n) = config.workers {
        pool = pool.num_threads(n);
    }
    let state = AppState {
        ctx: Arc::new(JobContext { preset_dir: config.preset_dir }),
        pool: Arc::new(pool.build()?),
    };
    Ok(Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/api/presets", get(presets))
        .route("/api/fixtures", get(|| async { Json(FIXTURE_NAMES) }))
        .route("/api/fixtures/{name}", get(fixture))
        .route("/api/evaluate", post(|s: State<AppState>, b: String| job(s, b, Some(JobMode::Point))))
        .route("/api/heatmap", post(|s: State<AppState>, b: String| job(s, b, Some(JobMode::Grid))))
        .route("/api/sweep", post(|s: State<AppState>, b: String| job(s, b, Some(JobMode::Sweep))))
        .route("/api/job", post(|s: State<AppState>, b: String| job(s, b, None)))
        .layer(CorsLayer::permissive())
        .with_state(state))
}

async fn presets(State(state): State<AppState>) -> Result<Response, ApiError> {
    Ok(Json(list_presets(state.ctx.preset_dir.as_deref())?).into_response())
}

async fn fixture(Path(name): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(fixture_document(&name)?).into_response())
}

async fn job(State(state): State<AppState>, body: String, mode: Option<JobMode>) -> Result<Response, ApiError> {
    let mut req = parse_job_request(&body)?;
    if let Some(mode) = mode {
        req.expect_mode(mode)?;
    }
    let AppState { ctx, pool } = state;
    let resp = tokio::task::spawn_blocking(move || pool.install(|| run_job(&req, &ctx)))
        .await
        .map_err(|e| ApiError(JobError::Internal(format!("evaluation task failed: {e}"))))??;
    Ok(Json(resp).into_response())
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> Result<(), ServiceError> {
    let app = router(config)?;
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|source| ServiceError::Bind { addr, source })?;
    axum::serve(listener, app).await?;
    Ok(())
}
