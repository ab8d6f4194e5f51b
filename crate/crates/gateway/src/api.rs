//! HTTP/JSON endpoints.

use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mazemate_core::compress::VnsConfig;
use mazemate_core::scaffold::{new_session, request_hint_with, DesignRequirements, HintPayload, HintSession};
use mazemate_core::solver::Limits;
use mazemate_core::{parse_maze, serialize_maze, Maze};
use serde::{Deserialize, Serialize};

use crate::chat::{converse, ChatContext, ChatModel, ChatTurn};
use crate::engine::{self, SolveMode};
use crate::error::{ApiError, ErrorCode};
use crate::store::{SessionEntry, Store};

pub const DEFAULT_TIMEBOX: Duration = Duration::from_secs(10);

#[derive(Clone)]
pub struct AppState {
    pub store: Store,
    pub chat: Option<Arc<dyn ChatModel>>,
    pub timebox: Duration,
    pub vns: VnsConfig,
}

impl AppState {
    pub fn new(store: Store) -> Self {
        AppState {
            store,
            chat: None,
            timebox: DEFAULT_TIMEBOX,
            vns: VnsConfig::default(),
        }
    }

    pub fn with_chat(mut self, model: Arc<dyn ChatModel>) -> Self {
        self.chat = Some(model);
        self
    }

    fn limits(&self) -> Limits {
        Limits::within(self.timebox)
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/mazes/{id}", get(get_maze).put(put_maze))
        .route("/mazes/{id}/validate", post(validate_maze))
        .route("/mazes/{id}/design-check", post(design_check))
        .route("/mazes/{id}/solve", post(solve))
        .route("/mazes/{id}/execute", post(execute))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/hint", post(hint))
        .route("/sessions/{id}/chat", post(chat))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, ErrorCode::NotFound, "no such endpoint") })
        .with_state(state)
}

type ApiResult<T> = Result<T, ApiError>;

fn json_text(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn storage(e: anyhow::Error) -> ApiError {
    ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal, format!("{e:#}"))
}

fn maze_of(st: &AppState, id: &str) -> ApiResult<Maze> {
    st.store.get_maze(id).ok_or_else(|| ApiError::not_found("maze", id))
}

/// Runs blocking engine work on the blocking pool.
async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal, e.to_string()))?
}

async fn put_maze(State(st): State<AppState>, Path(id): Path<String>, body: String) -> ApiResult<Response> {
    let m = parse_maze(&body)?;
    let canonical = serialize_maze(&m);
    st.store.put_maze(&id, m).map_err(storage)?;
    Ok(json_text(canonical))
}

async fn get_maze(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(json_text(serialize_maze(&maze_of(&st, &id)?)))
}

/// With a body, validates that document without storing it; without one,
/// reports on the stored maze.
async fn validate_maze(State(st): State<AppState>, Path(id): Path<String>, body: String) -> ApiResult<Response> {
    let m = if body.trim().is_empty() {
        maze_of(&st, &id)?
    } else {
        parse_maze(&body)?
    };
    Ok(Json(engine::validate(&m)).into_response())
}

async fn design_check(State(st): State<AppState>, Path(id): Path<String>, body: String) -> ApiResult<Response> {
    let m = maze_of(&st, &id)?;
    let req: DesignRequirements = if body.trim().is_empty() {
        DesignRequirements::default()
    } else {
        serde_json::from_str(&body).map_err(|e| {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, ErrorCode::Schema, format!("requirements: {e}"))
        })?
    };
    let limits = st.limits();
    let report = blocking(move || engine::design_check(&m, &req, &limits)).await?;
    Ok(Json(report).into_response())
}

#[derive(Deserialize)]
struct SolveQuery {
    mode: Option<String>,
}

async fn solve(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<SolveQuery>) -> ApiResult<Response> {
    let mode = match q.mode.as_deref() {
        None | Some("low") => SolveMode::Low,
        Some("high") => SolveMode::High,
        Some(other) => {
            return Err(ApiError::syntax(format!("mode must be low or high, not {other:?}")));
        }
    };
    let m = maze_of(&st, &id)?;
    let (vns, limits) = (st.vns.clone(), st.limits());
    let view = blocking(move || engine::solve(&m, mode, &vns, &limits)).await?;
    Ok(Json(view).into_response())
}

async fn execute(State(st): State<AppState>, Path(id): Path<String>, body: String) -> ApiResult<Response> {
    let m = maze_of(&st, &id)?;
    let view = blocking(move || engine::run_program(&m, &body)).await?;
    Ok(Json(view).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewSession {
    maze_id: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub maze_id: String,
    pub maze_hash: String,
    pub stage: u8,
    pub created_ms: u64,
    pub updated_ms: u64,
}

impl SessionView {
    fn of(maze_id: &str, s: &HintSession) -> Self {
        SessionView {
            session_id: s.id.clone(),
            maze_id: maze_id.to_string(),
            maze_hash: s.maze_hash.clone(),
            stage: s.stage,
            created_ms: s.created_ms,
            updated_ms: s.updated_ms,
        }
    }
}

fn json_body<T: for<'de> Deserialize<'de>>(body: &str) -> ApiResult<T> {
    serde_json::from_str(body).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, ErrorCode::Schema, e.to_string())
        }
        _ => ApiError::syntax(e.to_string()),
    })
}

async fn create_session(State(st): State<AppState>, body: String) -> ApiResult<Response> {
    let req: NewSession = json_body(&body)?;
    let m = maze_of(&st, &req.maze_id)?;
    let session = new_session(&m);
    let view = SessionView::of(&req.maze_id, &session);
    st.store
        .put_session(SessionEntry {
            maze_id: req.maze_id,
            session,
            chat: Vec::new(),
        })
        .map_err(storage)?;
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

fn session_of(st: &AppState, id: &str) -> ApiResult<SessionEntry> {
    st.store.get_session(id).ok_or_else(|| ApiError::not_found("session", id))
}

/// Issues the next hint and commits the session; the caller holds the
/// session lock.
async fn next_hint(st: &AppState, entry: &mut SessionEntry) -> ApiResult<HintPayload> {
    let m = maze_of(st, &entry.maze_id)?;
    let (session, vns, limits) = (entry.session.clone(), st.vns.clone(), st.limits());
    let (next, payload) = blocking(move || Ok(request_hint_with(&session, &m, &vns, &limits)?)).await?;
    entry.session = next;
    st.store.put_session(entry.clone()).map_err(storage)?;
    Ok(payload)
}

async fn hint(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let _guard = st.store.lock_session(&id).await;
    let mut entry = session_of(&st, &id)?;
    let payload = next_hint(&st, &mut entry).await?;
    Ok(Json(payload).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChatRequest {
    text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatResponse {
    pub reply: ChatTurn,
    /// Tool turns executed for this reply.
    pub tools: Vec<ChatTurn>,
    pub stage: u8,
    /// True when no model answered and a staged hint was issued instead.
    pub fallback: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hint: Option<HintPayload>,
}

async fn chat(State(st): State<AppState>, Path(id): Path<String>, body: String) -> ApiResult<Response> {
    let req: ChatRequest = json_body(&body)?;
    let _guard = st.store.lock_session(&id).await;
    let mut entry = session_of(&st, &id)?;
    let m = maze_of(&st, &entry.maze_id)?;
    if m.content_hash() != entry.session.maze_hash {
        return Err(mazemate_core::scaffold::HintError::StaleSession {
            expected: entry.session.maze_hash.clone(),
            found: m.content_hash(),
        }
        .into());
    }

    let unavailable = match &st.chat {
        None => "no language model is configured".to_string(),
        Some(model) => {
            let ctx = ChatContext {
                maze: &m,
                stage: entry.session.stage,
                history: &entry.chat,
                vns: &st.vns,
                timebox: st.timebox,
            };
            match converse(model.as_ref(), &ctx, &req.text).await {
                Ok(mut exchange) => {
                    let reply = exchange.turns.pop().expect("exchange ends with a reply");
                    entry.chat.push(ChatTurn::student(req.text));
                    entry.chat.extend(exchange.turns.iter().cloned());
                    entry.chat.push(reply.clone());
                    st.store.put_session(entry.clone()).map_err(storage)?;
                    let body = ChatResponse {
                        reply,
                        tools: exchange.turns,
                        stage: entry.session.stage,
                        fallback: false,
                        notice: exchange
                            .withheld
                            .then(|| "reply withheld: it contained the final program".to_string()),
                        hint: None,
                    };
                    return Ok(Json(body).into_response());
                }
                Err(e) => e.to_string(),
            }
        }
    };

    let payload = next_hint(&st, &mut entry).await?;
    let reply = ChatTurn::assistant(payload.rendered_text.clone());
    entry.chat.push(ChatTurn::student(req.text));
    entry.chat.push(reply.clone());
    st.store.put_session(entry.clone()).map_err(storage)?;
    let body = ChatResponse {
        reply,
        tools: Vec::new(),
        stage: entry.session.stage,
        fallback: true,
        notice: Some(format!("{} ({unavailable}); here is your next staged hint", ErrorCode::LlmUnavailable.as_str())),
        hint: Some(payload),
    };
    Ok(Json(body).into_response())
}
