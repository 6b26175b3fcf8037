//! HTTP interface: stateless recognition and debounced sessions.
//!
//! Each session sits behind its own async mutex. Tokio's mutex queues waiters
//! in arrival order, so frames posted to one session are processed one at a
//! time in the order their requests reached the lock.

use std::collections::HashMap;
use std::future::Future;
use std::path::PathBuf;
use std::sync::{Arc, Mutex as StdMutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;

use crate::classify::letter_label;
use crate::imaging::GrayImage;
use crate::io::{decode_pgm, decode_png_gray, emit_letter, Config, HookMode, ResultDocument};
use crate::pipeline::{process_frame, RecognitionSession, SessionMetrics};

pub const PGM_CONTENT_TYPE: &str = "image/x-portable-graymap";
pub const PNG_CONTENT_TYPE: &str = "image/png";

/// Monotonic time source, replaceable in tests.
pub trait Clock: Send + Sync {
    fn now(&self) -> Duration;
}

pub struct SystemClock(Instant);

impl SystemClock {
    pub fn new() -> Self {
        Self(Instant::now())
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }
}

/// Clock that only moves when told to.
#[derive(Default)]
pub struct ManualClock(StdMutex<Duration>);

impl ManualClock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn advance(&self, by: Duration) {
        *self.0.lock().expect("clock lock") += by;
    }

    pub fn set(&self, to: Duration) {
        *self.0.lock().expect("clock lock") = to;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Duration {
        *self.0.lock().expect("clock lock")
    }
}

struct Session {
    recognition: RecognitionSession,
    created_at: Duration,
    last_seen: Duration,
}

type SessionMap = HashMap<String, Arc<Mutex<Session>>>;

#[derive(Clone)]
pub struct AppState {
    config: Arc<Config>,
    sessions: Arc<StdMutex<SessionMap>>,
    clock: Arc<dyn Clock>,
}

impl AppState {
    pub fn new(config: Config) -> Self {
        Self::with_clock(config, Arc::new(SystemClock::new()))
    }

    pub fn with_clock(config: Config, clock: Arc<dyn Clock>) -> Self {
        Self {
            config: Arc::new(config),
            sessions: Arc::new(StdMutex::new(HashMap::new())),
            clock,
        }
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn live_sessions(&self) -> usize {
        self.purge_expired();
        self.sessions.lock().expect("session map lock").len()
    }

    fn idle_limit(&self) -> Duration {
        Duration::from_secs(self.config.service.session_idle_secs)
    }

    fn purge_expired(&self) {
        let now = self.clock.now();
        let limit = self.idle_limit();
        self.sessions.lock().expect("session map lock").retain(|_, s| match s.try_lock() {
            Ok(s) => now.saturating_sub(s.last_seen) <= limit,
            // Busy sessions are in use, so not idle.
            Err(_) => true,
        });
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.purge_expired();
        self.sessions
            .lock()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::SessionNotFound(id.to_string()))
    }
}

#[derive(Debug)]
pub enum ServiceError {
    EmptyBody,
    Undecodable(String),
    UnsupportedMediaType(String),
    SessionNotFound(String),
    BadRequest(String),
    Internal(String),
}

#[derive(Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let (status, message) = match self {
            ServiceError::EmptyBody => (StatusCode::BAD_REQUEST, "empty request body".to_string()),
            ServiceError::Undecodable(m) => (StatusCode::BAD_REQUEST, format!("undecodable image: {m}")),
            ServiceError::UnsupportedMediaType(t) => (
                StatusCode::UNSUPPORTED_MEDIA_TYPE,
                format!("unsupported content type `{t}`; send {PGM_CONTENT_TYPE} or {PNG_CONTENT_TYPE}"),
            ),
            ServiceError::SessionNotFound(id) => (StatusCode::NOT_FOUND, format!("no live session `{id}`")),
            ServiceError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ServiceError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, m),
        };
        (status, Json(ErrorBody { error: message })).into_response()
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub version: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionCreated {
    pub id: String,
    pub window: usize,
}

#[derive(Debug, Default, Deserialize)]
struct CreateParams {
    window: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
struct FrameParams {
    /// Capture time in seconds since the session began; defaults to the server clock.
    t: Option<f64>,
}

pub fn router(state: AppState) -> Router {
    router_with_ui(state, None)
}

/// Router that additionally serves static files under `/ui/`.
pub fn router_with_ui(state: AppState, ui_dir: Option<PathBuf>) -> Router {
    let cors = {
        let origin = &state.config.service.cors_origin;
        let allow = if origin == "*" {
            AllowOrigin::any()
        } else {
            match HeaderValue::from_str(origin) {
                Ok(v) => AllowOrigin::exact(v),
                Err(_) => AllowOrigin::list(Vec::<HeaderValue>::new()),
            }
        };
        CorsLayer::new()
            .allow_origin(allow)
            .allow_methods([Method::GET, Method::POST, Method::DELETE])
            .allow_headers([header::CONTENT_TYPE])
    };
    let limit = state.config.service.max_body_bytes;
    let mut app = Router::new()
        .route("/v1/healthz", get(healthz))
        .route("/v1/recognize", post(recognize))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}/frames", post(post_frame))
        .route("/v1/sessions/{id}", delete(delete_session));
    if let Some(dir) = ui_dir {
        app = app.nest_service("/ui", ServeDir::new(dir));
    }
    app.layer(DefaultBodyLimit::max(limit))
        .layer(cors)
        .with_state(state)
}

/// Serve until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    app: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}

async fn healthz() -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        version: env!("CARGO_PKG_VERSION").into(),
    })
}

fn decode_body(headers: &HeaderMap, body: &[u8]) -> Result<GrayImage, ServiceError> {
    let content_type = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("");
    let media = content_type.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
    let decode: fn(&[u8]) -> Result<GrayImage, String> = match media.as_str() {
        PGM_CONTENT_TYPE => |b| decode_pgm(b).map_err(|e| e.to_string()),
        PNG_CONTENT_TYPE => |b| decode_png_gray(b).map_err(|e| e.to_string()),
        _ => return Err(ServiceError::UnsupportedMediaType(content_type.to_string())),
    };
    if body.is_empty() {
        return Err(ServiceError::EmptyBody);
    }
    decode(body).map_err(ServiceError::Undecodable)
}

async fn run_frame(state: &AppState, img: GrayImage) -> Result<ResultDocument, ServiceError> {
    let config = state.config.clone();
    tokio::task::spawn_blocking(move || {
        process_frame(&img, &config.rules, &config.pipeline)
            .map(|r| ResultDocument::from_frame(&r))
            .map_err(|e| ServiceError::Undecodable(e.to_string()))
    })
    .await
    .map_err(|e| ServiceError::Internal(e.to_string()))?
}

async fn recognize(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Json<ResultDocument>, ServiceError> {
    let img = decode_body(&headers, &body)?;
    Ok(Json(run_frame(&state, img).await?))
}

async fn create_session(
    State(state): State<AppState>,
    Query(params): Query<CreateParams>,
) -> Result<(StatusCode, Json<SessionCreated>), ServiceError> {
    state.purge_expired();
    let window = params.window.unwrap_or(state.config.pipeline.window);
    if window == 0 {
        return Err(ServiceError::BadRequest("window must be at least 1".into()));
    }
    let now = state.clock.now();
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = Session {
        recognition: RecognitionSession::new(window),
        created_at: now,
        last_seen: now,
    };
    state
        .sessions
        .lock()
        .expect("session map lock")
        .insert(id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(SessionCreated { id, window })))
}

async fn post_frame(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Query<FrameParams>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Json<ResultDocument>, ServiceError> {
    let session = state.session(&id)?;
    let t = params.t;
    if t.is_some_and(|t| !t.is_finite() || t < 0.0) {
        return Err(ServiceError::BadRequest("t must be a non-negative number of seconds".into()));
    }
    let mut s = session.lock().await;
    let img = decode_body(&headers, &body)?;
    let mut doc = run_frame(&state, img).await?;
    let now = state.clock.now();
    s.last_seen = now;
    let elapsed = t.unwrap_or_else(|| now.saturating_sub(s.created_at).as_secs_f64());
    let letter = crate::classify::parse_letter_label(&doc.letter).unwrap_or(None);
    if let Some(event) = s.recognition.observe(letter, elapsed) {
        doc.stable_letter = Some(letter_label(Some(event.letter)));
        if state.config.hook.mode != HookMode::None {
            let hook = state.config.hook.clone();
            tokio::task::spawn_blocking(move || emit_letter(&event, &hook))
                .await
                .map_err(|e| ServiceError::Internal(e.to_string()))?;
        }
    }
    doc.metrics = Some(s.recognition.metrics().clone());
    Ok(Json(doc))
}

async fn delete_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<SessionMetrics>, ServiceError> {
    let session = state.session(&id)?;
    state.sessions.lock().expect("session map lock").remove(&id);
    let s = session.lock().await;
    Ok(Json(s.recognition.metrics().clone()))
}
