//! HTTP routes.

use std::convert::Infallible;
use std::sync::Arc;
use std::time::Duration;

use axum::body::{Body, Bytes};
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream, StreamExt};
use rdfsheet_core::mapping::{EditOp, MappingError, WorkbookOptions, WorkbookState};
use rdfsheet_core::rdf::RdfFormat;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::broadcast::error::RecvError;

use crate::session::{ChangeEvent, Registry, ServiceError, Subscription};

pub const ACTOR_HEADER: &str = "x-actor-id";
pub const REVISION_HEADER: &str = "x-revision";

pub type AppState = Arc<Registry>;

pub fn router(registry: AppState) -> Router {
    Router::new()
        .route("/workbooks", post(create_workbook).get(list_workbooks))
        .route("/workbooks/{id}", get(workbook_snapshot))
        .route("/workbooks/{id}/edits", post(post_edit))
        .route("/workbooks/{id}/changes", get(stream_changes))
        .route("/workbooks/{id}/export", get(export))
        .route("/workbooks/{id}/import", post(import))
        .route("/workbooks/{id}/suggest", get(suggest))
        .with_state(registry)
}

/// Error responses are JSON objects with `error` and `message` fields.
pub struct ApiError(StatusCode, serde_json::Value);

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl std::fmt::Display) -> Self {
        ApiError(status, json!({ "error": kind, "message": message.to_string() }))
    }

    fn unprocessable(message: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::NotFound(_) => Self::new(StatusCode::NOT_FOUND, "not_found", &e),
            ServiceError::SinceAhead { .. } => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "since_ahead", &e),
            ServiceError::Gone { oldest, .. } => ApiError(
                StatusCode::GONE,
                json!({ "error": "gone", "message": e.to_string(), "oldest": oldest }),
            ),
            ServiceError::Mapping(m) => m.into(),
            ServiceError::Storage(_) | ServiceError::Poisoned(_) => {
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "storage", &e)
            }
        }
    }
}

impl From<MappingError> for ApiError {
    fn from(e: MappingError) -> Self {
        match e {
            MappingError::Ambiguous { label, candidates } => ApiError(
                StatusCode::CONFLICT,
                json!({
                    "error": "ambiguous",
                    "message": format!("label {label:?} matches {} resources", candidates.len()),
                    "label": label,
                    "candidates": candidates,
                }),
            ),
            MappingError::Syntax(s) => ApiError(
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({ "error": "syntax", "message": s.message, "line": s.line, "column": s.column }),
            ),
            MappingError::ReplayMismatch { .. } | MappingError::InconsistentState(_) | MappingError::Canon(_) => {
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", &e)
            }
            other => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_edit", &other),
        }
    }
}

fn actor(headers: &HeaderMap) -> Option<String> {
    headers
        .get(ACTOR_HEADER)
        .and_then(|v| v.to_str().ok())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
}

#[derive(Serialize)]
struct Created {
    id: String,
    revision: u64,
}

async fn create_workbook(State(reg): State<AppState>, body: Bytes) -> Result<(StatusCode, Json<Created>), ApiError> {
    let options: WorkbookOptions = if body.iter().all(u8::is_ascii_whitespace) {
        WorkbookOptions::default()
    } else {
        serde_json::from_slice(&body).map_err(ApiError::unprocessable)?
    };
    let id = reg.create(options).await?;
    Ok((StatusCode::CREATED, Json(Created { id, revision: 0 })))
}

async fn list_workbooks(State(reg): State<AppState>) -> Json<Vec<String>> {
    Json(reg.list().await)
}

#[derive(Serialize)]
struct Snapshot {
    #[serde(flatten)]
    state: WorkbookState,
    triple_count: usize,
}

async fn workbook_snapshot(State(reg): State<AppState>, Path(id): Path<String>) -> Result<Json<Snapshot>, ApiError> {
    let session = reg.get(&id).await?;
    let st = session.read().await;
    Ok(Json(Snapshot {
        state: st.workbook.state(),
        triple_count: st.workbook.graph().len(),
    }))
}

async fn post_edit(
    State(reg): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Json<serde_json::Value>, ApiError> {
    let session = reg.get(&id).await?;
    let edit: EditOp = serde_json::from_slice(&body).map_err(ApiError::unprocessable)?;
    let event = match session.submit(edit, actor(&headers)).await {
        Ok(e) => e,
        Err(ServiceError::Mapping(MappingError::Ambiguous { label, candidates })) => {
            // offer enough context to pick one and resubmit as a paste
            let st = session.read().await;
            let described: Vec<_> = candidates
                .iter()
                .map(|iri| {
                    json!({
                        "iri": iri,
                        "label": st.workbook.display_label(iri),
                        "comment": st.workbook.comment(iri),
                    })
                })
                .collect();
            let message = format!("label {label:?} matches {} resources", candidates.len());
            return Err(ApiError(
                StatusCode::CONFLICT,
                json!({ "error": "ambiguous", "message": message, "label": label, "candidates": described }),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Json(json!({ "revision": event.revision, "delta": event.delta })))
}

#[derive(Deserialize)]
struct ChangesQuery {
    #[serde(default)]
    since: u64,
}

/// `id:` is the revision, `data:` the event JSON. Serialized JSON never
/// contains a raw newline, so one `data:` line suffices.
fn event_frame(e: &ChangeEvent) -> Bytes {
    let data = serde_json::to_string(e).expect("event serializes");
    Bytes::from(format!("id: {}\ndata: {data}\n\n", e.revision))
}

const HEARTBEAT_FRAME: &[u8] = b":heartbeat\n\n";

/// Backlog first, then live events, with a heartbeat comment whenever the
/// feed has been idle for `heartbeat`. A subscriber that falls too far
/// behind gets a `resync` event naming the revision to resume from and the
/// stream ends.
fn feed(sub: Subscription, since: u64, heartbeat: Duration) -> impl Stream<Item = Result<Bytes, Infallible>> {
    let last = sub.backlog.last().map_or(since, |e| e.revision);
    let backlog = stream::iter(sub.backlog.into_iter().map(|e| Ok(event_frame(&e))));
    let live = stream::unfold(Some((sub.live, last)), move |state| async move {
        let (mut rx, mut last) = state?;
        loop {
            let received = match tokio::time::timeout(heartbeat, rx.recv()).await {
                Err(_) => return Some((Ok(Bytes::from_static(HEARTBEAT_FRAME)), Some((rx, last)))),
                Ok(r) => r,
            };
            match received {
                Ok(e) if e.revision <= last => continue,
                Ok(e) => {
                    last = e.revision;
                    return Some((Ok(event_frame(&e)), Some((rx, last))));
                }
                Err(RecvError::Lagged(_)) => {
                    let data = json!({ "resume_from": last });
                    let frame = Bytes::from(format!("event: resync\ndata: {data}\n\n"));
                    return Some((Ok(frame), None));
                }
                Err(RecvError::Closed) => return None,
            }
        }
    });
    backlog.chain(live)
}

async fn stream_changes(
    State(reg): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<ChangesQuery>,
) -> Result<Response, ApiError> {
    let session = reg.get(&id).await?;
    let sub = session.subscribe(q.since).await?;
    let body = Body::from_stream(feed(sub, q.since, reg.config().heartbeat));
    Ok((
        [
            (header::CONTENT_TYPE, "text/event-stream"),
            (header::CACHE_CONTROL, "no-cache"),
        ],
        body,
    )
        .into_response())
}

#[derive(Deserialize)]
struct FormatQuery {
    format: Option<String>,
    #[serde(default)]
    vocabulary: bool,
}

fn parse_format(f: Option<&str>) -> Result<RdfFormat, ApiError> {
    match f {
        None => Ok(RdfFormat::NTriples),
        Some(s) => s.parse().map_err(|_| {
            ApiError::new(
                StatusCode::BAD_REQUEST,
                "unknown_format",
                format!("unknown format {s:?}"),
            )
        }),
    }
}

async fn export(
    State(reg): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<FormatQuery>,
) -> Result<Response, ApiError> {
    let format = parse_format(q.format.as_deref())?;
    let session = reg.get(&id).await?;
    let (body, revision) = {
        let st = session.read().await;
        (st.workbook.export(format), st.workbook.revision())
    };
    let mut resp = body.into_response();
    let h = resp.headers_mut();
    h.insert(header::CONTENT_TYPE, HeaderValue::from_static(format.media_type()));
    h.insert(REVISION_HEADER, HeaderValue::from(revision));
    Ok(resp)
}

async fn import(
    State(reg): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<FormatQuery>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Json<serde_json::Value>, ApiError> {
    let format = parse_format(q.format.as_deref())?;
    let session = reg.get(&id).await?;
    let document = String::from_utf8(body.to_vec()).map_err(ApiError::unprocessable)?;
    let edit = EditOp::Import {
        format,
        document,
        vocabulary: q.vocabulary,
    };
    let event = session.submit(edit, actor(&headers)).await?;
    Ok(Json(
        json!({ "triples_added": event.delta.added.len(), "revision": event.revision }),
    ))
}

#[derive(Deserialize)]
struct SuggestQuery {
    #[serde(default)]
    q: String,
    limit: Option<usize>,
}

async fn suggest(
    State(reg): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<SuggestQuery>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let session = reg.get(&id).await?;
    let st = session.read().await;
    let limit = q.limit.unwrap_or(10).min(100);
    Ok(Json(json!({
        "revision": st.workbook.revision(),
        "suggestions": st.workbook.autocomplete(&q.q, limit),
    })))
}
