//! HTTP API over a single analysis session.
//!
//! Loading a robot replaces the session and bumps its version. Pose
//! requests may carry the version they were made against (body field
//! `version` or header `x-session-version`); stale ones are rejected with
//! 409 so a client never mixes results from two robots.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use anyhow::Context;
use axum::extract::{Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use gsp_singularity::analysis::{analyze, to_json, AnalyzeOptions, Session};
use gsp_singularity::numeric::{Pose, DEFAULT_EPSILON};
use gsp_singularity::robot::RobotStructure;
use gsp_singularity::Error;
use serde::Deserialize;
use serde_json::json;
use tower_http::services::ServeDir;

use crate::commands::{condition_output, entities_output, evaluate_output};

pub const VERSION_HEADER: &str = "x-session-version";

struct Loaded {
    version: u64,
    session: Arc<Session>,
    pose: Pose,
}

#[derive(Default)]
pub struct AppState {
    loaded: RwLock<Option<Loaded>>,
    last_version: RwLock<u64>,
}

impl AppState {
    fn current(&self) -> Option<(u64, Arc<Session>, Pose)> {
        let guard = self.loaded.read().expect("lock poisoned");
        guard.as_ref().map(|l| (l.version, l.session.clone(), l.pose))
    }
}

fn json_body(status: StatusCode, body: String, version: Option<u64>) -> Response {
    let mut resp = (status, body).into_response();
    let headers = resp.headers_mut();
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    if let Some(v) = version {
        headers.insert(VERSION_HEADER, HeaderValue::from(v));
    }
    resp
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    json_body(status, to_json(&json!({ "error": message.into() })), None)
}

fn not_loaded() -> Response {
    error(StatusCode::CONFLICT, "no robot loaded; POST /api/robot first")
}

#[derive(Debug, Default, Deserialize)]
pub struct RobotParams {
    #[serde(default)]
    pub auto_reduce: bool,
}

async fn post_robot(State(state): State<Arc<AppState>>, Query(params): Query<RobotParams>, body: String) -> Response {
    let structure = match RobotStructure::from_json(&body) {
        Ok(s) => s,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let options = AnalyzeOptions {
        auto_reduce: params.auto_reduce,
        manual: None,
    };
    let analyzed = tokio::task::spawn_blocking(move || analyze(&structure, &options)).await;
    let session = match analyzed {
        Ok(Ok(s)) => s,
        Ok(Err(Error::InvalidStructure(violations))) => {
            return json_body(
                StatusCode::UNPROCESSABLE_ENTITY,
                to_json(&json!({ "error": "invalid robot structure", "violations": violations })),
                None,
            )
        }
        Ok(Err(e)) => return error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        Err(e) => return error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    };
    let body = to_json(&session.result);
    let mut last = state.last_version.write().expect("lock poisoned");
    *last += 1;
    let version = *last;
    *state.loaded.write().expect("lock poisoned") = Some(Loaded {
        version,
        session: Arc::new(session),
        pose: Pose::identity(),
    });
    json_body(StatusCode::OK, body, Some(version))
}

async fn get_condition(State(state): State<Arc<AppState>>) -> Response {
    match state.current() {
        Some((version, session, _)) => json_body(StatusCode::OK, condition_output(&session), Some(version)),
        None => not_loaded(),
    }
}

#[derive(Debug, Deserialize)]
pub struct PoseRequest {
    pub translation: [f64; 3],
    /// `[w, x, y, z]`, unit norm.
    pub quaternion: [f64; 4],
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub version: Option<u64>,
}

fn requested_version(headers: &HeaderMap, req: &PoseRequest) -> Result<Option<u64>, String> {
    if let Some(v) = req.version {
        return Ok(Some(v));
    }
    match headers.get(VERSION_HEADER) {
        None => Ok(None),
        Some(h) => h
            .to_str()
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .map(Some)
            .ok_or_else(|| format!("malformed {VERSION_HEADER} header")),
    }
}

async fn post_pose(State(state): State<Arc<AppState>>, headers: HeaderMap, body: String) -> Response {
    let req: PoseRequest = match serde_json::from_str(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("invalid pose request: {e}")),
    };
    let wanted = match requested_version(&headers, &req) {
        Ok(v) => v,
        Err(msg) => return error(StatusCode::BAD_REQUEST, msg),
    };
    let Some((version, session, _)) = state.current() else {
        return not_loaded();
    };
    if wanted.is_some_and(|w| w != version) {
        return error(
            StatusCode::CONFLICT,
            format!("stale session version {}; current is {version}", wanted.unwrap_or_default()),
        );
    }
    let pose = match Pose::new(req.translation, req.quaternion) {
        Ok(p) => p,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let body = match evaluate_output(&session, &pose, req.epsilon.unwrap_or(DEFAULT_EPSILON)) {
        Ok(b) => b,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
    };
    // Remember the pose for /api/entities unless a reload happened meanwhile.
    if let Some(l) = state.loaded.write().expect("lock poisoned").as_mut() {
        if l.version == version {
            l.pose = pose;
        }
    }
    json_body(StatusCode::OK, body, Some(version))
}

async fn get_entities(State(state): State<Arc<AppState>>) -> Response {
    match state.current() {
        Some((version, session, pose)) => json_body(StatusCode::OK, entities_output(&session, &pose), Some(version)),
        None => not_loaded(),
    }
}

pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/robot", post(post_robot))
        .route("/api/condition", get(get_condition))
        .route("/api/pose", post(post_pose))
        .route("/api/entities", get(get_entities))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(addr: SocketAddr, static_dir: Option<PathBuf>) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("cannot listen on {addr}"))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    let app = router(Arc::new(AppState::default()), static_dir);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
