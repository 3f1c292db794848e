//! HTTP service for the annotation front end.
//!
//! Estimation is stateless per request. Annotations are stored as one JSON
//! file per frame id and replaced atomically, so the last write wins.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine as _;
use crossroom::geometry::{estimate_frame, Annotation, EstimateMethod, GeometryConfig, GeometryError};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

const IMAGE_TYPES: &[(&str, &str)] = &[
    ("png", "image/png"),
    ("jpg", "image/jpeg"),
    ("jpeg", "image/jpeg"),
    ("bmp", "image/bmp"),
    ("webp", "image/webp"),
];

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub frames_dir: PathBuf,
    pub annotations_dir: PathBuf,
    pub static_dir: Option<PathBuf>,
}

struct AppState {
    config: ServiceConfig,
    geometry: GeometryConfig,
    writes: AtomicU64,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
    labels: Vec<String>,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.to_string(),
            message: message.into(),
            labels: Vec::new(),
        }
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string())
    }
}

impl From<GeometryError> for ApiError {
    fn from(e: GeometryError) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: e.code().to_string(),
            message: e.to_string(),
            labels: e.labels(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message, "labels": self.labels } });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(config: ServiceConfig) -> Router {
    let static_dir = config.static_dir.clone();
    let state = Arc::new(AppState {
        config,
        geometry: GeometryConfig::default(),
        writes: AtomicU64::new(0),
    });
    let api = Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/api/frames", get(list_frames))
        .route("/api/frames/{id}", get(frame_image))
        .route("/api/estimate", post(estimate))
        .route("/api/annotations", post(save_annotation))
        .route("/api/annotations/{id}", get(load_annotation))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

fn content_type(path: &Path) -> Option<&'static str> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    IMAGE_TYPES.iter().find(|(e, _)| *e == ext).map(|(_, t)| *t)
}

/// Image files of the frames directory as (id, path, content type), by id.
async fn frame_files(dir: &Path) -> ApiResult<Vec<(String, PathBuf, &'static str)>> {
    let mut rd = tokio::fs::read_dir(dir).await.map_err(ApiError::internal)?;
    let mut out = Vec::new();
    while let Some(e) = rd.next_entry().await.map_err(ApiError::internal)? {
        let path = e.path();
        let (Some(ct), Some(stem)) = (content_type(&path), path.file_stem().and_then(|s| s.to_str())) else {
            continue;
        };
        if valid_id(stem) {
            out.push((stem.to_string(), path, ct));
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Serialize)]
struct FrameInfo {
    id: String,
    content_type: &'static str,
    url: String,
    image_base64: String,
    annotated: bool,
}

async fn list_frames(State(s): State<Arc<AppState>>) -> ApiResult<Json<serde_json::Value>> {
    let mut frames = Vec::new();
    for (id, path, ct) in frame_files(&s.config.frames_dir).await? {
        let bytes = tokio::fs::read(&path).await.map_err(ApiError::internal)?;
        let annotated = s.config.annotations_dir.join(format!("{id}.json")).is_file();
        frames.push(FrameInfo {
            url: format!("/api/frames/{id}"),
            image_base64: base64::engine::general_purpose::STANDARD.encode(bytes),
            id,
            content_type: ct,
            annotated,
        });
    }
    Ok(Json(json!({ "frames": frames })))
}

fn unknown_frame(id: &str) -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "UnknownFrame", format!("no frame {id:?}"))
}

async fn frame_image(State(s): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    if !valid_id(&id) {
        return Err(unknown_frame(&id));
    }
    let files = frame_files(&s.config.frames_dir).await?;
    let (_, path, ct) = files.into_iter().find(|(f, _, _)| *f == id).ok_or_else(|| unknown_frame(&id))?;
    let bytes = tokio::fs::read(&path).await.map_err(ApiError::internal)?;
    Ok(([(header::CONTENT_TYPE, ct)], bytes).into_response())
}

#[derive(Deserialize)]
struct EstimateQuery {
    #[serde(default)]
    baseline: bool,
}

fn parse_annotation(body: &Bytes) -> ApiResult<Annotation> {
    let text = std::str::from_utf8(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "InvalidAnnotation", e.to_string()))?;
    Ok(Annotation::from_json(text)?)
}

async fn estimate(
    State(s): State<Arc<AppState>>,
    Query(q): Query<EstimateQuery>,
    body: Bytes,
) -> ApiResult<Response> {
    let ann = parse_annotation(&body)?;
    let method = if q.baseline { EstimateMethod::Baseline } else { EstimateMethod::CrossRatio };
    let response = estimate_frame(&ann, &s.geometry, method)?;
    Ok(Json(response).into_response())
}

async fn save_annotation(State(s): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let ann = parse_annotation(&body)?;
    if !valid_id(&ann.frame_id) {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "InvalidFrameId",
            format!("frame id {:?} must be letters, digits, '-', '_' or '.'", ann.frame_id),
        ));
    }
    let dir = &s.config.annotations_dir;
    tokio::fs::create_dir_all(dir).await.map_err(ApiError::internal)?;
    let path = dir.join(format!("{}.json", ann.frame_id));
    let n = s.writes.fetch_add(1, Ordering::Relaxed);
    let tmp = dir.join(format!(".{}.json.tmp{n}", ann.frame_id));
    let mut text = serde_json::to_string_pretty(&ann).map_err(ApiError::internal)?;
    text.push('\n');
    tokio::fs::write(&tmp, text).await.map_err(ApiError::internal)?;
    tokio::fs::rename(&tmp, &path).await.map_err(ApiError::internal)?;
    Ok(Json(json!({ "frame_id": ann.frame_id, "path": path })).into_response())
}

async fn load_annotation(State(s): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let missing = || ApiError::new(StatusCode::NOT_FOUND, "UnknownAnnotation", format!("no annotation for {id:?}"));
    if !valid_id(&id) {
        return Err(missing());
    }
    let text = tokio::fs::read_to_string(s.config.annotations_dir.join(format!("{id}.json")))
        .await
        .map_err(|_| missing())?;
    Ok(([(header::CONTENT_TYPE, "application/json")], text).into_response())
}

pub async fn serve(addr: std::net::SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    if !config.frames_dir.is_dir() {
        return Err(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{}: frames directory not readable", config.frames_dir.display()),
        ));
    }
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
