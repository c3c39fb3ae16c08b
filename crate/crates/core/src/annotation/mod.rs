//! Human fake-context annotation: edit validation and the task service.

mod diff;
mod store;
mod validate;

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::http::error_response;

pub use diff::{diff_hunks, patch, tokenize, Hunk, Token};
pub use store::{AnnotationStore, AnnotationTask, ReviewDecision, SubmitOutcome, TaskStatus};
pub use validate::{m_required, validate, ValidationResult, REVIEW_WARNING};

#[derive(Debug, Serialize, Deserialize)]
pub struct CreateTasksRequest {
    pub paragraphs: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreateTasksResponse {
    pub tasks: Vec<AnnotationTask>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NextQuery {
    pub annotator: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ValidateRequest {
    pub modified: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SubmitRequest {
    pub modified: String,
    pub annotator: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReviewRequest {
    pub decision: ReviewDecision,
}

fn failure(e: Error) -> Response {
    let status = match e {
        Error::NotFound(_) => StatusCode::NOT_FOUND,
        Error::Conflict(_) => StatusCode::CONFLICT,
        Error::Contract(_) => StatusCode::UNPROCESSABLE_ENTITY,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    };
    error_response(status, e.to_string())
}

type Shared = Arc<AnnotationStore>;

async fn create(State(store): State<Shared>, Json(req): Json<CreateTasksRequest>) -> Response {
    match store.create_batch(&req.paragraphs) {
        Ok(tasks) => (StatusCode::CREATED, Json(CreateTasksResponse { tasks })).into_response(),
        Err(e) => failure(e),
    }
}

async fn next(State(store): State<Shared>, Query(q): Query<NextQuery>) -> Response {
    if q.annotator.trim().is_empty() {
        return error_response(StatusCode::UNPROCESSABLE_ENTITY, "annotator must be non-empty");
    }
    match store.next_task(&q.annotator) {
        Some(task) => Json(task).into_response(),
        None => StatusCode::NO_CONTENT.into_response(),
    }
}

async fn get_task(State(store): State<Shared>, Path(id): Path<String>) -> Response {
    match store.get_task(&id) {
        Ok(task) => Json(task).into_response(),
        Err(e) => failure(e),
    }
}

async fn validate_route(
    State(store): State<Shared>,
    Path(id): Path<String>,
    Json(req): Json<ValidateRequest>,
) -> Response {
    match store.validate(&id, &req.modified) {
        Ok(result) => Json(result).into_response(),
        Err(e) => failure(e),
    }
}

async fn submit(State(store): State<Shared>, Path(id): Path<String>, Json(req): Json<SubmitRequest>) -> Response {
    match store.submit(&id, &req.modified, &req.annotator) {
        Ok(outcome @ SubmitOutcome::Submitted { .. }) => Json(outcome).into_response(),
        Ok(outcome @ SubmitOutcome::Rejected { .. }) => {
            (StatusCode::UNPROCESSABLE_ENTITY, Json(outcome)).into_response()
        }
        Err(e) => failure(e),
    }
}

async fn review(State(store): State<Shared>, Path(id): Path<String>, Json(req): Json<ReviewRequest>) -> Response {
    match store.review(&id, req.decision) {
        Ok(task) => Json(task).into_response(),
        Err(e) => failure(e),
    }
}

/// Task routes over a shared store.
pub fn router(store: Arc<AnnotationStore>) -> Router {
    Router::new()
        .route("/tasks", post(create))
        .route("/tasks/next", get(next))
        .route("/tasks/{id}", get(get_task))
        .route("/tasks/{id}/validate", post(validate_route))
        .route("/tasks/{id}/submit", post(submit))
        .route("/tasks/{id}/review", post(review))
        .with_state(store)
}
