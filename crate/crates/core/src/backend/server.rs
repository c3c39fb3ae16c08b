//! Serves in-process baselines over the wire protocol.

use std::sync::Arc;

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};

use super::wire::*;
use super::{Completer, ConstituencyParser, FillRequest, Filler, LookupDetector, MaskedSpan, Reader};
use crate::error::Error;
use crate::http::error_response;

/// Capabilities to serve; unset ones answer 501.
#[derive(Clone, Default)]
pub struct BaselineServices {
    pub parser: Option<Arc<dyn ConstituencyParser>>,
    pub filler: Option<Arc<dyn Filler>>,
    pub reader: Option<Arc<dyn Reader>>,
    pub detector: Option<Arc<LookupDetector>>,
    pub completer: Option<Arc<dyn Completer>>,
}

fn failure(e: Error) -> Response {
    let status = match e {
        Error::Contract(_) | Error::Span { .. } => StatusCode::UNPROCESSABLE_ENTITY,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    };
    error_response(status, e.to_string())
}

fn unconfigured(what: &str) -> Response {
    error_response(StatusCode::NOT_IMPLEMENTED, format!("{what} is not configured"))
}

fn empty(field: &str) -> Response {
    error_response(StatusCode::UNPROCESSABLE_ENTITY, format!("{field} must be non-empty"))
}

async fn parse(State(s): State<BaselineServices>, Json(req): Json<ParseRequest>) -> Response {
    let Some(parser) = &s.parser else {
        return unconfigured("parse");
    };
    if req.sentence.trim().is_empty() {
        return empty("sentence");
    }
    match parser.parse(&req.sentence) {
        Ok(tree) => Json(ParseResponse { tree }).into_response(),
        Err(e) => failure(e),
    }
}

async fn fill(State(s): State<BaselineServices>, Json(req): Json<FillRequestBody>) -> Response {
    let Some(filler) = &s.filler else {
        return unconfigured("fill");
    };
    if req.masked_sentence.matches(&req.mask_token).count() != 1 {
        return error_response(
            StatusCode::UNPROCESSABLE_ENTITY,
            "masked_sentence must contain the mask token exactly once",
        );
    }
    let request = FillRequest {
        first_sentence: req.first_sentence,
        previous_sentence: req.previous_sentence,
        masked_sentence: req.masked_sentence,
        next_sentence: req.next_sentence,
    };
    let span = MaskedSpan {
        label: req.label.unwrap_or_default(),
        original: req.original.unwrap_or_default(),
        mask_token: req.mask_token,
        seed: req.seed.unwrap_or(0),
    };
    match filler.fill(&request, &span, req.n_candidates) {
        Ok(candidates) => Json(FillResponse { candidates }).into_response(),
        Err(e) => failure(e),
    }
}

async fn read(State(s): State<BaselineServices>, Json(req): Json<ReadRequest>) -> Response {
    let Some(reader) = &s.reader else {
        return unconfigured("read");
    };
    if req.question.trim().is_empty() {
        return empty("question");
    }
    if req.paragraph.trim().is_empty() {
        return empty("paragraph");
    }
    match reader.read(&req.question, &req.paragraph) {
        Ok(a) => Json(ReadResponse {
            text: a.text,
            start: a.char_span.0,
            end: a.char_span.1,
            span_score: a.span_score,
        })
        .into_response(),
        Err(e) => failure(e),
    }
}

async fn detect(State(s): State<BaselineServices>, Json(req): Json<DetectRequest>) -> Response {
    let Some(detector) = &s.detector else {
        return unconfigured("detect");
    };
    if req.paragraph.trim().is_empty() {
        return empty("paragraph");
    }
    Json(DetectResponse {
        trust: detector.trust(&req.paragraph),
    })
    .into_response()
}

async fn complete(State(s): State<BaselineServices>, Json(req): Json<CompleteRequest>) -> Response {
    let Some(completer) = &s.completer else {
        return unconfigured("complete");
    };
    match completer.complete(&req.prompt) {
        Ok(continuation) => Json(CompleteResponse { continuation }).into_response(),
        Err(e) => failure(e),
    }
}

pub fn router(services: BaselineServices) -> Router {
    Router::new()
        .route("/parse", post(parse))
        .route("/fill", post(fill))
        .route("/read", post(read))
        .route("/detect", post(detect))
        .route("/complete", post(complete))
        .with_state(services)
}
