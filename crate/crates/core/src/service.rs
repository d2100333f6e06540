//! HTTP facade over the registry.
//!
//! Every route is served both at the root and under `/api/v1`. Bodies are
//! JSON except nanopublications (TriG) and views (HTML). Errors are
//! `{"error": message, "code": machine code, "findings": [...]}`.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use crate::nanopub::{validate, Finding, Nanopublication, TEMP_IRI};
use crate::rdf::{parse_trig, Iri};
use crate::registry::{GraphFormat, Registry, RegistryError, QUERIES};
use crate::superpattern::{ClassRef, Context, Qualifier, RelationType, SuperPattern};
use crate::trusty::ArtifactCode;
use crate::view;
use crate::vocab::vocab;
use crate::workflow::Kind;

#[derive(Debug, Clone)]
pub struct ApiConfig {
    pub bind: SocketAddr,
    pub store: PathBuf,
    pub venue: Iri,
    /// Directory of static UI assets served at `/`, if any.
    pub assets: Option<PathBuf>,
}

pub struct AppState {
    pub registry: Registry,
    pub venue: Iri,
}

pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    findings: Option<Vec<Finding>>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), findings: None }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }
}

impl From<RegistryError> for ApiError {
    fn from(e: RegistryError) -> Self {
        let message = e.to_string();
        match e {
            RegistryError::Syntax(_) => ApiError::new(StatusCode::BAD_REQUEST, "SyntaxError", message),
            RegistryError::ValidationFailed(f) => ApiError {
                findings: Some(f),
                ..ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ValidationFailed", message)
            },
            RegistryError::VerifyFailed => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "VerifyFailed", message),
            RegistryError::NotFound(_) => ApiError::new(StatusCode::NOT_FOUND, "NotFound", message),
            RegistryError::UnknownQuery(_) => ApiError::new(StatusCode::NOT_FOUND, "UnknownQuery", message),
            RegistryError::UnboundParameter(_) => ApiError::new(StatusCode::BAD_REQUEST, "UnboundParameter", message),
            RegistryError::InvalidParameter(..) => ApiError::new(StatusCode::BAD_REQUEST, "InvalidParameter", message),
            RegistryError::Workflow(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "WorkflowError", message),
            RegistryError::Nanopub(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ValidationFailed", message),
            RegistryError::Io(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "StorageError", message),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message, "code": self.code });
        if let Some(f) = self.findings {
            body["findings"] = json!(f);
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;
type Shared = State<Arc<AppState>>;

fn parse_code(code: &str) -> ApiResult<ArtifactCode> {
    let code = code.trim_end_matches(".trig");
    code.parse().map_err(|_| ApiError::new(StatusCode::NOT_FOUND, "NotFound", format!("not an artifact code: {code}")))
}

fn wants_json(headers: &HeaderMap, format: Option<&str>) -> bool {
    if let Some(f) = format {
        return f.eq_ignore_ascii_case("json");
    }
    headers.get(header::ACCEPT).and_then(|v| v.to_str().ok()).is_some_and(|a| a.contains("application/json"))
}

#[derive(Serialize)]
struct Published {
    code: String,
    iri: String,
}

/// Accepts a finalized nanopublication, or a draft under the temporary IRI
/// which is finalized here.
async fn post_np(State(st): Shared, body: Bytes) -> ApiResult<Response> {
    let text = std::str::from_utf8(&body)
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "SyntaxError", "body is not UTF-8"))?;
    let dataset = parse_trig(text).map_err(RegistryError::from)?;
    let np = Nanopublication::from_dataset(dataset).map_err(RegistryError::from)?;
    let findings = validate(&np);
    if !findings.is_empty() {
        return Err(RegistryError::ValidationFailed(findings).into());
    }
    let existed;
    let code = if np.iri().as_str() == TEMP_IRI {
        let (fin, code) = np.finalize().map_err(RegistryError::from)?;
        existed = st.registry.contains(&code);
        st.registry.publish(&fin)?
    } else {
        existed = np.code().is_some_and(|c| st.registry.contains(&c));
        st.registry.publish_trig(text)?
    };
    let status = if existed { StatusCode::OK } else { StatusCode::CREATED };
    let body = Published { iri: code.iri().to_string(), code: code.to_string() };
    Ok((status, [(header::LOCATION, format!("/np/{}", body.code))], Json(body)).into_response())
}

#[derive(Deserialize)]
struct FormatParam {
    format: Option<String>,
    venue: Option<String>,
}

async fn get_np(
    State(st): Shared,
    Path(code): Path<String>,
    Query(q): Query<FormatParam>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    let code = parse_code(&code)?;
    if wants_json(&headers, q.format.as_deref()) {
        let idx = st.registry.snapshot();
        let e = idx.get(&code.iri()).ok_or_else(|| RegistryError::NotFound(code.to_string()))?;
        let g = e.np.graph_names();
        let body = json!({
            "iri": e.iri(),
            "code": code.to_string(),
            "type": e.kind.map(|k| k.letter().to_string()),
            "created": e.created.map(|t| crate::nanopub::format_timestamp(&t)),
            "creators": e.np.creators(),
            "supersedes": e.np.supersedes(),
            "graphs": { "head": g[0], "assertion": g[1], "provenance": g[2], "pubinfo": g[3] },
            "graph_names": g,
            "quads": e.np.dataset().len(),
        });
        return Ok(Json(body).into_response());
    }
    let trig = st.registry.fetch_trig(&code)?;
    Ok(([(header::CONTENT_TYPE, "application/trig; charset=utf-8")], trig).into_response())
}

async fn list_queries() -> Json<Value> {
    Json(json!(QUERIES))
}

/// Follow-up links that a client can offer next to each row.
fn deep_links(name: &str, row: &mut crate::registry::Row) {
    let code = |row: &crate::registry::Row, k: &str| row.get(k).and_then(Value::as_str).map(str::to_string);
    match name {
        "list-submissions" => {
            if let Some(c) = code(row, "head_code") {
                row.insert("review_link".into(), json!(format!("/#/review?target={c}")));
                row.insert("view_link".into(), json!(format!("/view/{c}")));
            }
            if let Some(c) = code(row, "code") {
                row.insert("thread_link".into(), json!(format!("/#/thread?submission={c}")));
            }
        }
        "reviews-for" => {
            if let Some(c) = code(row, "code") {
                row.insert("respond_link".into(), json!(format!("/#/respond?review={c}")));
            }
        }
        _ => {
            if let Some(c) = code(row, "code") {
                row.insert("view_link".into(), json!(format!("/view/{c}")));
            }
        }
    }
}

async fn run_query(
    State(st): Shared,
    Path(name): Path<String>,
    Query(params): Query<BTreeMap<String, String>>,
) -> ApiResult<Json<Value>> {
    let mut result = st.registry.run_query(&name, &params)?;
    for row in &mut result.rows {
        deep_links(&name, row);
    }
    Ok(Json(json!(result)))
}

async fn get_view(State(st): Shared, Path(code): Path<String>) -> ApiResult<Html<String>> {
    let code = parse_code(&code)?;
    let idx = st.registry.snapshot();
    let e = idx.get(&code.iri()).ok_or_else(|| RegistryError::NotFound(code.to_string()))?;
    Ok(Html(view::render(&idx, e)))
}

fn venue_of(st: &AppState, venue: Option<&str>) -> ApiResult<Iri> {
    match venue {
        Some(v) if !v.trim().is_empty() => Ok(Registry::resolve(v)?),
        _ => Ok(st.venue.clone()),
    }
}

async fn get_graph(State(st): Shared, Query(q): Query<FormatParam>, headers: HeaderMap) -> ApiResult<Response> {
    let venue = venue_of(&st, q.venue.as_deref())?;
    let dot_accept =
        headers.get(header::ACCEPT).and_then(|v| v.to_str().ok()).is_some_and(|a| a.contains("text/vnd.graphviz"));
    let format = match q.format.as_deref() {
        Some(f) => f.parse::<GraphFormat>().map_err(ApiError::bad_request)?,
        None if dot_accept => GraphFormat::Dot,
        None => GraphFormat::Json,
    };
    let g = st.registry.export_graph(&venue);
    Ok(match format {
        GraphFormat::Json => Json(json!(g)).into_response(),
        GraphFormat::Dot => ([(header::CONTENT_TYPE, "text/vnd.graphviz; charset=utf-8")], g.to_dot()).into_response(),
    })
}

async fn get_stats(State(st): Shared, Query(q): Query<FormatParam>) -> ApiResult<Json<Value>> {
    let venue = venue_of(&st, q.venue.as_deref())?;
    Ok(Json(json!(st.registry.stats(&venue))))
}

async fn get_status(State(st): Shared, Path(code): Path<String>) -> ApiResult<Json<Value>> {
    let iri = Registry::resolve(&code)?;
    let (thread, status) = st.registry.status(&iri)?;
    Ok(Json(json!({ "status": status, "thread": thread })))
}

async fn get_integrity(State(st): Shared) -> Json<Value> {
    let findings = st.registry.integrity();
    Json(json!({ "findings": findings }))
}

async fn get_constants(State(st): Shared) -> Json<Value> {
    let v = vocab();
    let dims = |m: &indexmap::IndexMap<String, Iri>| m.keys().cloned().collect::<Vec<_>>();
    Json(json!({
        "version": v.version,
        "venue": st.venue,
        "prefixes": v.prefixes,
        "qualifiers": Qualifier::all().iter().map(|q| json!({
            "name": q.to_string(),
            "iri": q.iri(),
            "comparison": q.comparison().symbol(),
            "threshold": q.threshold().to_string(),
        })).collect::<Vec<_>>(),
        "relations": RelationType::all().iter().map(|r| json!({"name": r.name(), "iri": r.iri()})).collect::<Vec<_>>(),
        "universal_context": v.superpattern.universal_context,
        "review": {
            "aspect": dims(&v.review.aspect),
            "disposition": dims(&v.review.disposition),
            "action": dims(&v.review.action),
            "impact": [1, 2, 3, 4, 5],
            "agreement": dims(&v.review.agreement),
            "addressed": dims(&v.review.addressed),
        },
        "decision": dims(&v.publishing.decision),
        "kinds": Kind::ALL.iter().map(|k| json!({"letter": k.letter().to_string(), "name": k.description()})).collect::<Vec<_>>(),
        "terms": v,
    }))
}

#[derive(Deserialize)]
struct RenderSlot {
    iri: Iri,
    label: String,
}

#[derive(Deserialize)]
struct RenderRequest {
    /// Absent or null for the universal context.
    context: Option<RenderSlot>,
    subject: RenderSlot,
    qualifier: String,
    relation: String,
    object: RenderSlot,
}

/// Sentence and formula for unsaved slot values (live preview).
async fn post_render(Json(req): Json<RenderRequest>) -> ApiResult<Json<Value>> {
    let class = |s: RenderSlot| ClassRef::new(s.iri, s.label);
    let sp = SuperPattern {
        context: req.context.map_or(Context::Universal, |c| Context::Class(class(c))),
        subject: class(req.subject),
        qualifier: req
            .qualifier
            .parse()
            .map_err(|e: crate::superpattern::SuperpatternError| ApiError::bad_request(e.to_string()))?,
        relation: RelationType::from_name(&req.relation).map_err(|e| ApiError::bad_request(e.to_string()))?,
        object: class(req.object),
    };
    sp.check().map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "InvalidInstantiation", e.to_string()))?;
    Ok(Json(json!({ "sentence": sp.render_sentence(), "formula": sp.render_formula() })))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "NotFound", "no such endpoint")
}

fn api() -> Router<Arc<AppState>> {
    Router::new()
        .route("/np", post(post_np))
        .route("/np/{code}", get(get_np))
        .route("/queries", get(list_queries))
        .route("/queries/{name}", get(run_query))
        .route("/view/{code}", get(get_view))
        .route("/graph", get(get_graph))
        .route("/stats", get(get_stats))
        .route("/status/{code}", get(get_status))
        .route("/integrity", get(get_integrity))
        .route("/constants", get(get_constants))
        .route("/render", post(post_render))
}

/// The full application: API at the root and under `/api/v1`, plus static
/// assets when configured.
pub fn router(state: Arc<AppState>, assets: Option<PathBuf>) -> Router {
    let app = api().nest("/api/v1", api()).with_state(state);
    match assets {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.fallback(not_found),
    }
}

pub fn app(config: &ApiConfig) -> Result<Router, RegistryError> {
    let state = Arc::new(AppState { registry: Registry::open(&config.store)?, venue: config.venue.clone() });
    Ok(router(state, config.assets.clone()))
}

/// Serves until Ctrl-C.
pub async fn serve(config: ApiConfig) -> std::io::Result<()> {
    let app = app(&config).map_err(std::io::Error::other)?;
    let listener = tokio::net::TcpListener::bind(config.bind).await?;
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
