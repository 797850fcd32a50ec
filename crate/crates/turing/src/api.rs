//! HTTP routes.
//!
//! | method | path | body / query |
//! |---|---|---|
//! | POST | `/sessions` | [`CreateSession`] |
//! | GET | `/sessions/{id}` | |
//! | GET | `/sessions/{id}/next` | |
//! | POST | `/sessions/{id}/judgments` | `{"index": n, "label": "real" \| "fake"}` |
//! | GET | `/sessions/{id}/report` | |
//! | GET | `/report/aggregate` | `?ids=a,b,c` |
//! | GET | `/images/{token}` | |

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;

use crate::error::ServiceError;
use crate::service::{Ack, CreateSession, NextItem, Report, SessionInfo, TuringService};
use crate::session::Judgment;

type Shared = Arc<TuringService>;

#[derive(Debug, Deserialize)]
pub struct JudgmentBody {
    pub index: usize,
    pub label: Judgment,
}

#[derive(Debug, Deserialize)]
pub struct AggregateQuery {
    pub ids: String,
}

pub fn router(service: Shared) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(info))
        .route("/sessions/{id}/next", get(next))
        .route("/sessions/{id}/judgments", post(judge))
        .route("/sessions/{id}/report", get(report))
        .route("/report/aggregate", get(aggregate))
        .route("/images/{token}", get(image))
        .with_state(service)
}

async fn create(
    State(svc): State<Shared>,
    Json(req): Json<CreateSession>,
) -> Result<(StatusCode, Json<SessionInfo>), ServiceError> {
    let info = tokio::task::spawn_blocking(move || svc.create_session(req))
        .await
        .map_err(|e| ServiceError::Log(e.to_string()))??;
    Ok((StatusCode::CREATED, Json(info)))
}

async fn info(State(svc): State<Shared>, Path(id): Path<String>) -> Result<Json<SessionInfo>, ServiceError> {
    svc.info(&id).map(Json)
}

async fn next(State(svc): State<Shared>, Path(id): Path<String>) -> Result<Json<NextItem>, ServiceError> {
    svc.next(&id).map(Json)
}

async fn judge(
    State(svc): State<Shared>,
    Path(id): Path<String>,
    Json(body): Json<JudgmentBody>,
) -> Result<Json<Ack>, ServiceError> {
    svc.submit(&id, body.index, body.label).map(Json)
}

async fn report(State(svc): State<Shared>, Path(id): Path<String>) -> Result<Json<Report>, ServiceError> {
    svc.report(&id).map(Json)
}

async fn aggregate(
    State(svc): State<Shared>,
    Query(q): Query<AggregateQuery>,
) -> Result<Json<Report>, ServiceError> {
    let ids: Vec<String> = q.ids.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
    svc.aggregate(&ids).map(Json)
}

async fn image(State(svc): State<Shared>, Path(token): Path<String>) -> Result<impl IntoResponse, ServiceError> {
    let path = svc.image_path(&token)?;
    let bytes = tokio::fs::read(&path).await.map_err(|_| ServiceError::NotFound("image".into()))?;
    Ok(([(header::CONTENT_TYPE, "image/png"), (header::CACHE_CONTROL, "no-store")], bytes))
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, service: Shared) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(service)).await
}
