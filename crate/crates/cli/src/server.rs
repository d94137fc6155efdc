//! Local HTTP API over a finished report.
//!
//! Read-only except `POST /api/themes`, which validates a ThemeSpec against
//! the report's topics, stores it (with computed counts) beside the report by
//! atomic replace and answers with the derived ThemeReport.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use revmon_core::report::MonitorReport;
use revmon_core::topics::{merge_topics, ThemeSpec};
use serde_json::json;
use tokio::sync::Mutex;
use tower_http::services::ServeDir;

#[derive(Debug, Clone)]
pub struct ServeOptions {
    pub report: PathBuf,
    pub themes: PathBuf,
    pub host: String,
    pub port: u16,
    pub assets: Option<PathBuf>,
}

pub struct AppState {
    /// The report file exactly as read.
    report_body: String,
    report: MonitorReport,
    themes_path: PathBuf,
    write_lock: Mutex<()>,
}

impl AppState {
    pub fn load(report_path: &Path, themes_path: PathBuf) -> anyhow::Result<Self> {
        let report_body =
            std::fs::read_to_string(report_path).with_context(|| format!("reading {}", report_path.display()))?;
        let report = MonitorReport::from_json(&report_body).with_context(|| format!("parsing {}", report_path.display()))?;
        Ok(AppState {
            report_body,
            report,
            themes_path,
            write_lock: Mutex::new(()),
        })
    }
}

fn json_body(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

async fn get_report(State(state): State<Arc<AppState>>) -> Response {
    json_body(state.report_body.clone())
}

async fn get_topics(State(state): State<Arc<AppState>>) -> Response {
    match &state.report.topics {
        Some(topics) => Json(topics).into_response(),
        None => error(StatusCode::NOT_FOUND, "report has no topics section"),
    }
}

async fn get_themes(State(state): State<Arc<AppState>>) -> Response {
    match tokio::fs::read_to_string(&state.themes_path).await {
        Ok(body) => json_body(body),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Json(ThemeSpec::default()).into_response(),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, format!("reading theme spec: {e}")),
    }
}

async fn post_themes(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let spec: ThemeSpec = match serde_json::from_slice(&body) {
        Ok(spec) => spec,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("malformed theme spec: {e}")),
    };
    let Some(topics) = &state.report.topics else {
        return error(StatusCode::UNPROCESSABLE_ENTITY, "report has no topics to merge");
    };
    let derived = match merge_topics(&topics.model, &spec) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
    };
    let stored = match spec.with_counts(&topics.model.topic_sizes) {
        Ok(s) => s,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
    };
    let mut bytes = serde_json::to_vec_pretty(&stored).expect("theme spec serializes");
    bytes.push(b'\n');

    let _guard = state.write_lock.lock().await;
    let path = state.themes_path.clone();
    match tokio::task::spawn_blocking(move || crate::write_atomic(&path, &bytes)).await {
        Ok(Ok(())) => Json(derived).into_response(),
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, format!("storing theme spec: {e:#}")),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn placeholder() -> Html<&'static str> {
    Html(concat!(
        "<!doctype html><title>revmon</title>",
        "<p>The workbench is not built. API: ",
        "<a href=\"/api/report\">/api/report</a>, ",
        "<a href=\"/api/topics\">/api/topics</a>, ",
        "<a href=\"/api/themes\">/api/themes</a>.</p>"
    ))
}

pub fn router(state: Arc<AppState>, assets: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/report", get(get_report))
        .route("/api/topics", get(get_topics))
        .route("/api/themes", get(get_themes).post(post_themes))
        .with_state(state);
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(placeholder)),
    }
}

pub async fn serve(options: ServeOptions) -> anyhow::Result<()> {
    let state = Arc::new(AppState::load(&options.report, options.themes.clone())?);
    let app = router(state, options.assets.as_deref());
    let addr: SocketAddr = format!("{}:{}", options.host, options.port)
        .parse()
        .with_context(|| format!("bad listen address {}:{}", options.host, options.port))?;
    let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    println!("serving {} on http://{addr}", options.report.display());
    axum::serve(listener, app).await?;
    Ok(())
}
