//! HTTP and WebSocket front end. One session per client token; writes to a
//! session are serialized by its mutex.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use bwqa_core::session::ClockMode;
use bwqa_core::world::{WorldBlock, WorldFile};
use bwqa_core::{ErrorCode, MoveOutcome, Point3, Session, SessionError, SessionEvent, Transducer, World};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::{broadcast, Mutex};

pub const TOKEN_HEADER: &str = "x-session-token";
const DEFAULT_TOKEN: &str = "default";

pub struct AppState {
    world: World,
    transducer: Transducer,
    clock: ClockMode,
    sessions: std::sync::Mutex<HashMap<String, Arc<Slot>>>,
}

struct Slot {
    session: Mutex<Session>,
    events: broadcast::Sender<SessionEvent>,
    started: Instant,
}

impl Slot {
    /// Wall-clock seconds since the session opened, or the last recorded
    /// clock plus one second under a simulated clock.
    fn now(&self, s: &Session) -> f64 {
        match s.clock_mode() {
            ClockMode::Real => self.started.elapsed().as_secs_f64(),
            ClockMode::Simulated => s.last_clock() + 1.0,
        }
    }

    fn publish(&self, s: &Session, from: usize) {
        for e in &s.transcript()[from..] {
            let _ = self.events.send(e.clone());
        }
    }
}

impl AppState {
    pub fn new(world: World, transducer: Transducer, clock: ClockMode) -> Arc<Self> {
        Arc::new(AppState {
            world,
            transducer,
            clock,
            sessions: Default::default(),
        })
    }

    fn slot(&self, token: &str) -> Arc<Slot> {
        let mut sessions = self.sessions.lock().expect("session table poisoned");
        sessions
            .entry(token.to_string())
            .or_insert_with(|| {
                let session = Session::with_transducer(self.world.clone(), self.transducer.clone(), 0.0).with_clock_mode(self.clock);
                Arc::new(Slot {
                    session: Mutex::new(session),
                    events: broadcast::channel(256).0,
                    started: Instant::now(),
                })
            })
            .clone()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/scene", get(scene))
        .route("/api/move", post(move_block))
        .route("/api/ask", post(ask))
        .route("/api/history", get(history))
        .route("/api/events", get(events))
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    axum::serve(listener, router(state)).await
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
}

impl ApiError {
    fn bad_request(message: String) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: "bad-request".into(),
            message,
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let code = e.code();
        let status = match code {
            ErrorCode::UnknownBlock => StatusCode::NOT_FOUND,
            ErrorCode::OutOfBounds | ErrorCode::Interpenetration => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorCode::ClockRegression => StatusCode::CONFLICT,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let code = serde_json::to_value(code).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        ApiError {
            status,
            code,
            message: e.to_string(),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

#[derive(Debug, Deserialize)]
pub struct TokenQuery {
    token: Option<String>,
    at: Option<usize>,
}

fn token<'a>(headers: &'a HeaderMap, query: &'a TokenQuery) -> &'a str {
    headers
        .get(TOKEN_HEADER)
        .and_then(|v| v.to_str().ok())
        .or(query.token.as_deref())
        .unwrap_or(DEFAULT_TOKEN)
}

async fn scene(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    query: Result<Query<TokenQuery>, QueryRejection>,
) -> Result<Json<WorldFile>, ApiError> {
    let Query(q) = query?;
    let slot = state.slot(token(&headers, &q));
    let s = slot.session.lock().await;
    let scene = s.scene_at(q.at)?;
    let blocks = s
        .world()
        .blocks
        .iter()
        .filter_map(|b| {
            Some(WorldBlock {
                name: b.name.clone(),
                color: b.color,
                position: scene.position(&b.name).ok()?,
            })
        })
        .collect();
    let [w, d] = scene.half_extents();
    Ok(Json(WorldFile {
        blocks,
        side: scene.side(),
        table: [w * 2.0, d * 2.0],
    }))
}

#[derive(Debug, Deserialize)]
pub struct MoveRequest {
    block: String,
    to: [f64; 3],
}

#[derive(Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
enum MoveResponse {
    Recorded { tokens: [usize; 2], event: SessionEvent },
    Noise { displacement: f64, event: SessionEvent },
}

async fn move_block(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    query: Result<Query<TokenQuery>, QueryRejection>,
    body: Result<Json<MoveRequest>, JsonRejection>,
) -> Result<Json<MoveResponse>, ApiError> {
    let Query(q) = query?;
    let Json(req) = body?;
    let slot = state.slot(token(&headers, &q));
    let mut s = slot.session.lock().await;
    let before = s.transcript().len();
    let now = slot.now(&s);
    let result = s.handle_move(&req.block, Point3::from(req.to), now);
    slot.publish(&s, before);
    let event = s.transcript().last().cloned().expect("transcript holds init");
    Ok(Json(match result? {
        MoveOutcome::Recorded { in_progress, finished } => MoveResponse::Recorded {
            tokens: [in_progress, finished],
            event,
        },
        MoveOutcome::Noise { displacement } => MoveResponse::Noise { displacement, event },
    }))
}

#[derive(Debug, Deserialize)]
pub struct AskRequest {
    text: String,
}

#[derive(Debug, Serialize)]
pub struct AskResponse {
    answer: String,
    ulf: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorCode>,
}

async fn ask(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    query: Result<Query<TokenQuery>, QueryRejection>,
    body: Result<Json<AskRequest>, JsonRejection>,
) -> Result<Json<AskResponse>, ApiError> {
    let Query(q) = query?;
    let Json(req) = body?;
    let slot = state.slot(token(&headers, &q));
    let mut s = slot.session.lock().await;
    let before = s.transcript().len();
    let now = slot.now(&s);
    let reply = s.handle_ask(&req.text, now);
    slot.publish(&s, before);
    Ok(Json(AskResponse {
        answer: reply.text,
        ulf: reply.ulf,
        error: reply.error,
    }))
}

async fn history(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    query: Result<Query<TokenQuery>, QueryRejection>,
) -> Result<Json<Vec<SessionEvent>>, ApiError> {
    let Query(q) = query?;
    let slot = state.slot(token(&headers, &q));
    let s = slot.session.lock().await;
    Ok(Json(s.transcript().to_vec()))
}

async fn events(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    query: Result<Query<TokenQuery>, QueryRejection>,
    ws: WebSocketUpgrade,
) -> Result<Response, ApiError> {
    let Query(q) = query?;
    let rx = state.slot(token(&headers, &q)).events.subscribe();
    Ok(ws.on_upgrade(move |socket| stream_events(socket, rx)))
}

async fn stream_events(mut socket: WebSocket, mut rx: broadcast::Receiver<SessionEvent>) {
    loop {
        tokio::select! {
            event = rx.recv() => match event {
                Ok(e) => {
                    let Ok(text) = serde_json::to_string(&e) else { continue };
                    if socket.send(Message::Text(text.into())).await.is_err() {
                        break;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => break,
            },
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                Some(Ok(_)) => {}
            },
        }
    }
}
