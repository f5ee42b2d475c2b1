use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use super::{
    ApiResult, CreateSessionRequest, CreateStoreRequest, FeedbackRequest, FeedbackResponse, GenerateRequest,
    GenerateResponse, QueryRequest, RoundView, SelectResponse, Service, SessionView, StoreSummary,
};
use crate::priors::PriorStore;

type AppState = Arc<Service>;

#[derive(Debug, Default, Deserialize)]
struct RoundQuery {
    #[serde(default)]
    latents: bool,
}

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/round", get(get_round))
        .route("/sessions/{id}/feedback", post(submit_feedback))
        .route("/stores", get(list_stores).post(create_store))
        .route("/stores/{id}", get(get_store))
        .route("/stores/{id}/select", post(select))
        .route("/stores/{id}/generate", post(generate))
        .with_state(service)
}

/// Serves until `shutdown` resolves, then lets in-flight requests finish.
/// Transcripts are synced on every append, so nothing else needs flushing.
pub async fn serve(
    service: Arc<Service>,
    listener: tokio::net::TcpListener,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let addr: Option<SocketAddr> = listener.local_addr().ok();
    tracing::info!(?addr, "serving");
    axum::serve(listener, router(service)).with_graceful_shutdown(shutdown).await
}

async fn create_session(State(svc): State<AppState>, Json(req): Json<CreateSessionRequest>) -> ApiResult<(StatusCode, Json<Value>)> {
    let (session, round) = svc.create_session(req)?;
    Ok((StatusCode::CREATED, Json(json!({ "session": session, "round": round }))))
}

async fn get_session(State(svc): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    Ok(Json(svc.get_session(&id)?))
}

async fn get_round(
    State(svc): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<RoundQuery>,
) -> ApiResult<Json<RoundView>> {
    Ok(Json(svc.get_round(&id, q.latents)?))
}

async fn submit_feedback(
    State(svc): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<RoundQuery>,
    Json(req): Json<FeedbackRequest>,
) -> ApiResult<Json<FeedbackResponse>> {
    Ok(Json(svc.submit_feedback(&id, req, q.latents)?))
}

async fn list_stores(State(svc): State<AppState>) -> ApiResult<Json<Vec<StoreSummary>>> {
    Ok(Json(svc.list_stores()?))
}

async fn create_store(State(svc): State<AppState>, Json(req): Json<CreateStoreRequest>) -> ApiResult<(StatusCode, Json<StoreSummary>)> {
    Ok((StatusCode::CREATED, Json(svc.create_store(req)?)))
}

async fn get_store(State(svc): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<PriorStore>> {
    Ok(Json(svc.load_store(&id)?))
}

async fn select(
    State(svc): State<AppState>,
    Path(id): Path<String>,
    Json(q): Json<QueryRequest>,
) -> ApiResult<Json<SelectResponse>> {
    Ok(Json(svc.select(&id, &q)?))
}

async fn generate(
    State(svc): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<GenerateRequest>,
) -> ApiResult<Json<GenerateResponse>> {
    Ok(Json(svc.generate(&id, &req)?))
}
