//! Local JSON-over-HTTP service. Responses carry the same documents the
//! command line writes to files.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use kokonet::geometry::FlexionBundle;
use kokonet::search::SearchConfig;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use tokio::sync::Mutex;

use crate::commands::{
    run_classify, run_flex, run_qs, run_search_report, to_json, ClassifyRequest, FlexRequest, QsRequest,
};

/// Bundles kept in memory; the oldest is evicted first.
pub const CACHE_CAPACITY: usize = 256;

#[derive(Default)]
struct BundleCache {
    order: VecDeque<String>,
    by_id: HashMap<String, Arc<str>>,
}

impl BundleCache {
    fn insert(&mut self, id: String, body: Arc<str>) {
        if self.by_id.insert(id.clone(), body).is_none() {
            self.order.push_back(id);
            while self.order.len() > CACHE_CAPACITY {
                if let Some(old) = self.order.pop_front() {
                    self.by_id.remove(&old);
                }
            }
        }
    }
}

#[derive(Clone, Default)]
pub struct AppState {
    cache: Arc<Mutex<BundleCache>>,
}

/// Hex SHA-256 of a document, used as its cache key.
pub fn content_id(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

enum ApiError {
    Schema(String),
    Kokonet(kokonet::Error),
    NotFound(String),
    Internal(String),
}

impl From<kokonet::Error> for ApiError {
    fn from(e: kokonet::Error) -> Self {
        ApiError::Kokonet(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, name, message) = match self {
            ApiError::Schema(m) => (StatusCode::BAD_REQUEST, "SchemaError", m),
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, "NotFound", m),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, "InternalError", m),
            ApiError::Kokonet(e) => {
                let status = if e.is_domain_rejection() {
                    StatusCode::UNPROCESSABLE_ENTITY
                } else {
                    StatusCode::INTERNAL_SERVER_ERROR
                };
                (status, e.name(), e.to_string())
            }
        };
        let body = serde_json::json!({ "error": name, "message": message });
        (status, [(header::CONTENT_TYPE, "application/json")], body.to_string()).into_response()
    }
}

fn parse<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::Schema(e.to_string()))
}

fn json_response(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

/// Runs blocking numerics off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::Internal(e.to_string()))
}

async fn cache_bundle(state: &AppState, bundle: &FlexionBundle) -> Response {
    let text: Arc<str> = bundle.to_json().into();
    let id = content_id(&text);
    state.cache.lock().await.insert(id.clone(), text.clone());
    let mut resp = json_response(text.to_string());
    if let Ok(v) = HeaderValue::from_str(&format!("/bundle/{id}")) {
        resp.headers_mut().insert(header::LOCATION, v);
    }
    resp
}

async fn post_search(body: Bytes) -> Result<Response, ApiError> {
    let cfg: SearchConfig = parse(&body)?;
    cfg.validate()?;
    let report = blocking(move || run_search_report(&cfg)).await??;
    Ok(json_response(to_json(&report)))
}

async fn post_classify(body: Bytes) -> Result<Response, ApiError> {
    let req: ClassifyRequest = parse(&body)?;
    let report = blocking(move || run_classify(&req)).await??;
    Ok(json_response(to_json(&report)))
}

async fn post_qs(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: QsRequest = parse(&body)?;
    let out = blocking(move || run_qs(&req)).await??;
    Ok(cache_bundle(&state, &out.bundle).await)
}

async fn post_flex(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: FlexRequest = parse(&body)?;
    let out = blocking(move || run_flex(&req)).await??;
    let mut resp = cache_bundle(&state, &out.bundle).await;
    if let Some(d) = out.diagnostic.and_then(|d| HeaderValue::from_str(&d).ok()) {
        resp.headers_mut().insert("x-trace-diagnostic", d);
    }
    Ok(resp)
}

async fn get_bundle(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let cache = state.cache.lock().await;
    let text = cache.by_id.get(&id).ok_or_else(|| ApiError::NotFound(format!("no bundle {id}")))?;
    Ok(json_response(text.to_string()))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/search", post(post_search))
        .route("/classify", post(post_classify))
        .route("/qs", post(post_qs))
        .route("/flex", post(post_flex))
        .route("/bundle/{id}", get(get_bundle))
        .with_state(state)
}

pub async fn serve(host: &str, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    eprintln!("kokonet serving on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::default())).await
}
