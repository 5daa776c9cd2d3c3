use std::collections::HashMap;
use std::convert::Infallible;
use std::io;
use std::str::FromStr;
use std::sync::Arc;

use axum::body::{Body, Bytes};
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream, StreamExt};
use serde::Deserialize;
use serde_json::json;

use super::{ApiError, ErrorKind, Limits, ProgramCache, RenderRequest, DEFAULT_CHUNK};
use crate::analysis::{estimate_pitch_with, BitBandMatrix, PitchConfig, PitchReference};
use crate::audio::{wav_header, SampleChunk, DEFAULT_RATE, MAX_WAV_SAMPLES};
use crate::corpus::presets;
use crate::expr::{format, parse};
use crate::semantics::{typecheck, Program, SemanticsMode};

/// Shared by every request handler. Cloning is cheap.
#[derive(Debug, Clone)]
pub struct AppState {
    pub cache: Arc<ProgramCache>,
    pub limits: Limits,
    /// Samples per body chunk of a streamed render.
    pub chunk: usize,
}

impl Default for AppState {
    fn default() -> Self {
        AppState::new(Limits::default(), 64)
    }
}

impl AppState {
    pub fn new(limits: Limits, cache_capacity: usize) -> Self {
        AppState {
            cache: Arc::new(ProgramCache::new(cache_capacity)),
            limits,
            chunk: DEFAULT_CHUNK,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = if self.too_large {
            StatusCode::PAYLOAD_TOO_LARGE
        } else if self.kind == ErrorKind::Internal {
            StatusCode::INTERNAL_SERVER_ERROR
        } else {
            StatusCode::BAD_REQUEST
        };
        (status, Json(self)).into_response()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/expr/parse", post(parse_expr))
        .route("/render", get(render_raw))
        .route("/render.wav", get(render_wav))
        .route("/analyze/pitch", get(analyze_pitch))
        .route("/analyze/bits", get(analyze_bits))
        .route("/presets", get(|| async { Json(presets()) }))
        .route("/cache", get(|State(s): State<AppState>| async move { Json(s.cache.stats()) }))
        .with_state(state)
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> io::Result<()> {
    axum::serve(listener, router(state)).await
}

#[derive(Debug, Deserialize)]
struct ParseRequest {
    expr: String,
    #[serde(default)]
    mode: SemanticsMode,
}

async fn parse_expr(State(state): State<AppState>, body: Result<Json<ParseRequest>, JsonRejection>) -> Response {
    let req = match body {
        Ok(Json(req)) => req,
        Err(e) => return ApiError::range(e.body_text()).into_response(),
    };
    if let Err(e) = state.limits.check_expr(&req.expr) {
        return e.into_response();
    }
    let checked = parse(&req.expr)
        .map_err(crate::semantics::CompileError::from)
        .and_then(|e| typecheck(&e, req.mode).map(|_| e).map_err(Into::into));
    match checked {
        Ok(e) => Json(json!({"ok": true, "canonical": format(&e)})).into_response(),
        Err(err) => Json(json!({"ok": false, "error": ApiError::from(err)})).into_response(),
    }
}

/// Query parameters with typed accessors that report bad values as
/// range errors.
struct Params(HashMap<String, String>);

impl Params {
    fn from_query(q: Result<Query<HashMap<String, String>>, QueryRejection>) -> Result<Self, ApiError> {
        q.map(|Query(map)| Params(map)).map_err(|e| ApiError::range(e.body_text()))
    }

    fn parsed<T: FromStr>(&self, name: &str, default: T) -> Result<T, ApiError>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.get(name) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|e| ApiError::range(format!("invalid {name} '{raw}': {e}"))),
        }
    }

    fn render_request(&self, limits: &Limits, analysis: bool) -> Result<RenderRequest, ApiError> {
        let expr = self
            .0
            .get("expr")
            .ok_or_else(|| ApiError::range("missing parameter 'expr'"))?;
        limits.check_expr(expr)?;
        let rate: u32 = self.parsed("rate", DEFAULT_RATE)?;
        if rate == 0 {
            return Err(ApiError::range("rate must be positive"));
        }
        let n: u64 = self.parsed("n", rate as u64)?;
        let n = if analysis {
            limits.check_analysis_samples(n)?
        } else {
            limits.check_samples(n)?
        };
        Ok(RenderRequest {
            expr: expr.clone(),
            mode: self.parsed("mode", SemanticsMode::C32)?,
            t0: self.parsed("t0", 0)?,
            n,
            rate,
        })
    }
}

fn sample_stream(p: Arc<Program>, t0: u64, n: usize, chunk: usize) -> impl Stream<Item = Result<Bytes, Infallible>> {
    stream::iter((0..n).step_by(chunk.max(1))).map(move |start| {
        let mut buf = vec![0u8; chunk.min(n - start)];
        p.render_into(t0.wrapping_add(start as u64), &mut buf);
        Ok(Bytes::from(buf))
    })
}

fn render_setup(
    state: &AppState,
    query: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> Result<(RenderRequest, Arc<Program>), ApiError> {
    let req = Params::from_query(query)?.render_request(&state.limits, false)?;
    let program = state.cache.get(&req.expr, req.mode)?;
    Ok((req, program))
}

async fn render_raw(
    State(state): State<AppState>,
    query: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> Result<Response, ApiError> {
    let (req, program) = render_setup(&state, query)?;
    let body = Body::from_stream(sample_stream(program, req.t0, req.n, state.chunk));
    Ok(([(header::CONTENT_TYPE, "application/octet-stream")], body).into_response())
}

async fn render_wav(
    State(state): State<AppState>,
    query: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> Result<Response, ApiError> {
    let (req, program) = render_setup(&state, query)?;
    if req.n as u64 > MAX_WAV_SAMPLES {
        return Err(ApiError::too_large("too many samples for a WAV file"));
    }
    let header = wav_header(req.n as u64, req.rate).map_err(|e| ApiError::internal(e.to_string()))?;
    let head = stream::once(async move { Ok(Bytes::copy_from_slice(&header)) });
    let body = Body::from_stream(head.chain(sample_stream(program, req.t0, req.n, state.chunk)));
    Ok(([(header::CONTENT_TYPE, "audio/wav")], body).into_response())
}

/// Runs CPU-heavy analysis off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("analysis task failed: {e}")))
}

async fn analyze_pitch(
    State(state): State<AppState>,
    query: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> Result<Response, ApiError> {
    let params = Params::from_query(query)?;
    let req = params.render_request(&state.limits, true)?;
    let window: usize = params.parsed("window", 1024)?;
    if window < 128 {
        return Err(ApiError::range("window must be at least 128 samples"));
    }
    let reference: PitchReference = params.parsed("ref", PitchReference::A440)?;
    let program = state.cache.get(&req.expr, req.mode)?;
    let events = blocking(move || {
        let mut data = vec![0u8; req.n];
        program.render_into(req.t0, &mut data);
        let chunk = SampleChunk::new(req.t0, data).with_rate(req.rate);
        let config = PitchConfig {
            window_len: window,
            reference,
            ..PitchConfig::default()
        };
        estimate_pitch_with(&chunk, &config)
    })
    .await?;
    Ok(Json(events).into_response())
}

async fn analyze_bits(
    State(state): State<AppState>,
    query: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> Result<Response, ApiError> {
    let params = Params::from_query(query)?;
    let req = params.render_request(&state.limits, true)?;
    let window: usize = params.parsed("window", 1024)?;
    if window < 2 {
        return Err(ApiError::range("window must be at least 2 samples"));
    }
    let program = state.cache.get(&req.expr, req.mode)?;
    let matrix = blocking(move || BitBandMatrix::compute(&program, req.t0, req.n, window)).await?;
    Ok(Json(matrix).into_response())
}
