use std::future::Future;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use fuzzyshell::kb::OverrideRecord;
use fuzzyshell::Edit;
use serde::Deserialize;
use tokio::net::TcpListener;

use crate::error::ServiceError;
use crate::model::{
    ChildRecord, ChildRequest, ConsultRequest, KbAccepted, KbDocument, KbPutRequest, KbVariables,
    OverrideRequest, SharedService, StoredConsultation,
};

type Reply<T> = Result<Json<T>, ServiceError>;
type Created<T> = Result<(StatusCode, Json<T>), ServiceError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ServiceError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ServiceError::bad_request(e.body_text()))
}

fn path_id(id: Result<Path<u64>, PathRejection>) -> Result<u64, ServiceError> {
    id.map(|Path(id)| id)
        .map_err(|e| ServiceError::not_found(e.body_text()))
}

/// Runs blocking service work off the async executor.
async fn blocking<T, F>(service: &SharedService, f: F) -> Result<T, ServiceError>
where
    T: Send + 'static,
    F: FnOnce(&crate::TherapyService) -> Result<T, ServiceError> + Send + 'static,
{
    let service = Arc::clone(service);
    tokio::task::spawn_blocking(move || f(&service))
        .await
        .map_err(ServiceError::storage)?
}

async fn consult(
    State(service): State<SharedService>,
    payload: Result<Json<ConsultRequest>, JsonRejection>,
) -> Created<StoredConsultation> {
    let request = body(payload)?;
    let stored = blocking(&service, move |s| s.consult(&request)).await?;
    Ok((StatusCode::CREATED, Json(stored)))
}

async fn consultation(
    State(service): State<SharedService>,
    id: Result<Path<u64>, PathRejection>,
) -> Reply<StoredConsultation> {
    Ok(Json(service.consultation(path_id(id)?)?))
}

async fn kb_get(State(service): State<SharedService>) -> Json<KbDocument> {
    Json(service.kb_document())
}

async fn kb_put(
    State(service): State<SharedService>,
    payload: Result<Json<KbPutRequest>, JsonRejection>,
) -> Reply<KbAccepted> {
    let request = body(payload)?;
    Ok(Json(blocking(&service, move |s| s.put_kb(&request)).await?))
}

async fn kb_edit(
    State(service): State<SharedService>,
    payload: Result<Json<Edit>, JsonRejection>,
) -> Reply<KbAccepted> {
    let edit = body(payload)?;
    Ok(Json(blocking(&service, move |s| s.edit_kb(&edit)).await?))
}

async fn kb_variables(State(service): State<SharedService>) -> Json<KbVariables> {
    Json(service.kb_variables())
}

async fn override_post(
    State(service): State<SharedService>,
    payload: Result<Json<OverrideRequest>, JsonRejection>,
) -> Created<OverrideRecord> {
    let request = body(payload)?;
    let record = blocking(&service, move |s| s.record_override(&request)).await?;
    Ok((StatusCode::CREATED, Json(record)))
}

#[derive(Debug, Deserialize)]
struct ChildFilter {
    child_id: Option<u64>,
}

async fn override_list(
    State(service): State<SharedService>,
    filter: Result<Query<ChildFilter>, QueryRejection>,
) -> Reply<Vec<OverrideRecord>> {
    let Query(filter) = filter.map_err(|e| ServiceError::bad_request(e.body_text()))?;
    Ok(Json(service.overrides(filter.child_id)))
}

async fn child_create(
    State(service): State<SharedService>,
    payload: Result<Json<ChildRequest>, JsonRejection>,
) -> Created<ChildRecord> {
    let request = body(payload)?;
    let child = blocking(&service, move |s| s.create_child(&request)).await?;
    Ok((StatusCode::CREATED, Json(child)))
}

async fn child_list(State(service): State<SharedService>) -> Json<Vec<ChildRecord>> {
    Json(service.children())
}

async fn child_get(
    State(service): State<SharedService>,
    id: Result<Path<u64>, PathRejection>,
) -> Reply<ChildRecord> {
    Ok(Json(service.child(path_id(id)?)?))
}

async fn child_consultations(
    State(service): State<SharedService>,
    id: Result<Path<u64>, PathRejection>,
) -> Reply<Vec<StoredConsultation>> {
    Ok(Json(service.child_consultations(path_id(id)?)?))
}

async fn fallback() -> ServiceError {
    ServiceError::not_found("no such endpoint")
}

pub fn router(service: SharedService) -> Router {
    Router::new()
        .route("/consult", post(consult))
        .route("/consultations/{id}", get(consultation))
        .route("/kb", get(kb_get).put(kb_put))
        .route("/kb/edits", post(kb_edit))
        .route("/kb/variables", get(kb_variables))
        .route("/overrides", get(override_list).post(override_post))
        .route("/children", get(child_list).post(child_create))
        .route("/children/{id}", get(child_get))
        .route("/children/{id}/consultations", get(child_consultations))
        .fallback(fallback)
        .with_state(service)
}

/// Serves `service` on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    service: SharedService,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, "therapy service listening");
    }
    axum::serve(listener, router(service))
        .with_graceful_shutdown(shutdown)
        .await
}

/// Resolves on Ctrl-C or, on Unix, SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
    tracing::info!("shutting down");
}
