//! Read-only HTTP service over one basis archive.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mtpga_core::analysis::{persistence_correlation, BasisArchive, CorrelationView, Layout2D};
use mtpga_core::pga::PgaParams;
use mtpga_core::{reconstruct, Bdt};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::commands::{archive_kind, layout, reconstruction};
use crate::{CliError, Result};

pub struct ServiceState {
    pub archive: BasisArchive,
    pub ensemble: Option<Vec<Bdt>>,
    layout: Option<Layout2D>,
    correlation: Option<CorrelationView>,
}

impl ServiceState {
    /// Precomputes the layout and, when inputs are available, the
    /// correlation view.
    pub fn new(archive: BasisArchive, ensemble: Option<Vec<Bdt>>) -> Result<Self> {
        let layout = (archive.axes.len() >= 2).then(|| layout(&archive)).transpose()?;
        let correlation = match &ensemble {
            Some(e) if e.len() >= 2 => Some(persistence_correlation(e, &archive.basis())?),
            _ => None,
        };
        Ok(Self {
            archive,
            ensemble,
            layout,
            correlation,
        })
    }
}

type Shared = Arc<ServiceState>;

#[derive(Debug, Deserialize)]
pub struct ReconstructRequest {
    pub alpha: Vec<f64>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct Meta<'a> {
    d_max: usize,
    members: usize,
    origin_branches: usize,
    axis_lengths: &'a [f64],
    params: &'a PgaParams,
    tree_kind: &'a str,
    format_version: u32,
    member_ids: &'a [String],
    has_inputs: bool,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct MemberView {
    index: usize,
    id: Option<String>,
    alpha: Vec<f64>,
    input: Option<Bdt>,
    reconstruction: Bdt,
    reconstruction_error: Option<f64>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

async fn get_layout(State(s): State<Shared>) -> Response {
    match &s.layout {
        Some(l) => Json(l).into_response(),
        None => error(StatusCode::NOT_FOUND, "layout needs at least two axes"),
    }
}

async fn get_correlation(State(s): State<Shared>) -> Response {
    match &s.correlation {
        Some(c) => Json(c).into_response(),
        None => error(StatusCode::NOT_FOUND, "correlation needs the input ensemble"),
    }
}

async fn get_meta(State(s): State<Shared>) -> Response {
    let a = &s.archive;
    Json(Meta {
        d_max: a.axes.len(),
        members: a.coords.len(),
        origin_branches: a.origin.len(),
        axis_lengths: &a.axis_lengths,
        params: &a.params,
        tree_kind: archive_kind(a).as_str(),
        format_version: a.format_version,
        member_ids: &a.member_ids,
        has_inputs: s.ensemble.is_some(),
    })
    .into_response()
}

async fn get_member(State(s): State<Shared>, Path(j): Path<usize>) -> Response {
    let a = &s.archive;
    let Some(alpha) = a.coords.get(j) else {
        return error(StatusCode::NOT_FOUND, format!("no member {j}"));
    };
    match reconstruct(&a.basis(), alpha) {
        Ok(rec) => Json(MemberView {
            index: j,
            id: a.member_ids.get(j).cloned(),
            alpha: alpha.clone(),
            input: s.ensemble.as_ref().and_then(|e| e.get(j).cloned()),
            reconstruction: rec,
            reconstruction_error: a.reconstruction_errors.get(j).copied(),
        })
        .into_response(),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn post_reconstruct(
    State(s): State<Shared>,
    body: std::result::Result<Json<ReconstructRequest>, JsonRejection>,
) -> Response {
    let Json(req) = match body {
        Ok(b) => b,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.body_text()),
    };
    let state = s.clone();
    let result = tokio::task::spawn_blocking(move || reconstruction(&state.archive, &req.alpha)).await;
    match result {
        Ok(Ok(r)) => Json(r).into_response(),
        Ok(Err(e @ CliError::Core(_))) if e.exit_code() == 2 => error(StatusCode::BAD_REQUEST, e.to_string()),
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

const INDEX: &str = "<!doctype html>
<html><head><meta charset=\"utf-8\"><title>mtpga</title></head>
<body>
<h1>mtpga basis service</h1>
<ul>
<li><a href=\"/api/basis/meta\">/api/basis/meta</a></li>
<li><a href=\"/api/layout\">/api/layout</a></li>
<li><a href=\"/api/correlation\">/api/correlation</a></li>
<li>/api/member/{j}</li>
<li>POST /api/reconstruct {\"alpha\": [...]}</li>
</ul>
</body></html>
";

/// API routes, plus `static_dir` (the explorer build) at `/` when given.
pub fn router(state: ServiceState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/layout", get(get_layout))
        .route("/api/correlation", get(get_correlation))
        .route("/api/basis/meta", get(get_meta))
        .route("/api/member/{j}", get(get_member))
        .route("/api/reconstruct", post(post_reconstruct))
        .with_state(Arc::new(state));
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(INDEX) })),
    }
}

pub async fn serve(state: ServiceState, port: u16, static_dir: Option<PathBuf>) -> Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| CliError::Data(format!("cannot listen on {addr}: {e}")))?;
    eprintln!("serving on http://{}", listener.local_addr().map_err(|e| CliError::Data(e.to_string()))?);
    axum::serve(listener, router(state, static_dir))
        .await
        .map_err(|e| CliError::Data(format!("server error: {e}")))
}
