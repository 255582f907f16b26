//! HTTP/JSON API over [`FreezeSession`]s.
//!
//! Each session sits behind its own mutex, so increments on one session are
//! applied one at a time. After every change a read-only view is published;
//! readers clone it without waiting for a running increment.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

use ptfreeze::alignment::fits;
use ptfreeze::eventlog::{import_path, EventLog};
use ptfreeze::freezing::FreezeError;
use ptfreeze::ipda::{IpdaError, IpdaOptions};
use ptfreeze::metrics::QualityReport;
use ptfreeze::scenario::Algorithm;
use ptfreeze::session::{FreezeSession, SessionError, SessionSnapshot};
use ptfreeze::{is_subtree, parse_tree, AlignmentError, Trace};

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    /// Machine-readable name of the failing stage.
    pub stage: &'static str,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, stage: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, stage, message: message.into() }
    }

    fn no_session(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "session", format!("no session {id}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}

fn alignment_stage(e: &AlignmentError) -> (StatusCode, &'static str) {
    match e {
        AlignmentError::BudgetExceeded { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "alignment_budget"),
        AlignmentError::NotInLanguage { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "alignment"),
    }
}

fn ipda_stage(e: &IpdaError) -> (StatusCode, &'static str) {
    match e {
        IpdaError::Precondition { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "precondition"),
        IpdaError::Postcondition { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "ipda_postcondition"),
        IpdaError::Unknown(_) => (StatusCode::BAD_REQUEST, "ipda"),
        IpdaError::Alignment(a) => alignment_stage(a),
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let (status, stage) = match &e {
            SessionError::ReservedActivity(_) | SessionError::NoInitialTree => (StatusCode::BAD_REQUEST, "log"),
            SessionError::AlreadyStarted => (StatusCode::CONFLICT, "seed"),
            SessionError::NoVariant(_) => (StatusCode::BAD_REQUEST, "variant"),
            SessionError::NothingToUndo => (StatusCode::CONFLICT, "undo"),
            SessionError::Snapshot(_) => (StatusCode::BAD_REQUEST, "snapshot"),
            SessionError::Tree(_) => (StatusCode::BAD_REQUEST, "tree"),
            SessionError::Ipda(i) => ipda_stage(i),
            SessionError::Alignment(a) => alignment_stage(a),
            SessionError::Freeze(f) => match f {
                FreezeError::Nested { .. }
                | FreezeError::NotFound(_)
                | FreezeError::LabelCollision(_)
                | FreezeError::EmptyFrozenSet
                | FreezeError::Tree(_) => (StatusCode::BAD_REQUEST, "frozen_selection"),
                FreezeError::Precondition { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "precondition"),
                FreezeError::Postcondition(_) => (StatusCode::UNPROCESSABLE_ENTITY, "postcondition"),
                FreezeError::Infeasible(_) => (StatusCode::UNPROCESSABLE_ENTITY, "reinsertion"),
                FreezeError::Ipda(i) => ipda_stage(i),
                FreezeError::Alignment(a) => alignment_stage(a),
            },
        };
        ApiError::new(status, stage, e.to_string())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NodeView {
    pub id: usize,
    pub path: Vec<usize>,
    pub label: String,
    pub frozen: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TreeView {
    pub tree: String,
    pub dot: String,
    /// Every node in pre-order with its child-index path.
    pub nodes: Vec<NodeView>,
    pub frozen: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VariantView {
    pub index: usize,
    pub trace: Vec<String>,
    pub frequency: usize,
    /// Accepted by the current tree.
    pub covered: bool,
    /// Already added to the tree.
    pub added: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Invariants {
    pub previous_accepted: bool,
    pub frozen_present: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IncrementResponse {
    pub tree: TreeView,
    pub report: QualityReport,
    pub invariants: Invariants,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MetricsRow {
    pub increment: usize,
    pub fitness: f64,
    pub precision: f64,
    pub f_measure: f64,
}

/// Everything the read endpoints serve, rebuilt after each change.
#[derive(Clone, Debug)]
struct View {
    tree: TreeView,
    variants: Vec<VariantView>,
    metrics: Vec<MetricsRow>,
}

fn build_view(s: &FreezeSession) -> View {
    let t = s.tree();
    let frozen_roots: Vec<_> = s.frozen().items().iter().map(|f| f.root).collect();
    let nodes = t
        .node_ids()
        .map(|v| NodeView {
            id: v.0,
            path: t.path_of(v),
            label: t.label(v).to_string(),
            frozen: frozen_roots.iter().any(|&r| r == v || t.is_descendant(v, r)),
        })
        .collect();
    let tree = TreeView { tree: t.to_string(), dot: t.to_dot(), nodes, frozen: s.frozen_paths() };
    let costs = &s.report().variants;
    let variants = s
        .variants()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let trace: Vec<String> = v.trace.iter().map(|a| a.to_string()).collect();
            let covered = costs.iter().any(|c| c.trace == trace && c.cost == 0);
            VariantView { index: i, trace, frequency: v.frequency, covered, added: s.is_added(&v.trace) }
        })
        .collect();
    let metrics = s
        .reports()
        .iter()
        .enumerate()
        .map(|(i, r)| MetricsRow { increment: i, fitness: r.fitness, precision: r.precision, f_measure: r.f_measure })
        .collect();
    View { tree, variants, metrics }
}

struct Slot {
    session: Mutex<FreezeSession>,
    view: RwLock<Arc<View>>,
}

impl Slot {
    fn new(session: FreezeSession) -> Self {
        let view = RwLock::new(Arc::new(build_view(&session)));
        Slot { session: Mutex::new(session), view }
    }

    fn view(&self) -> Arc<View> {
        self.view.read().expect("view lock").clone()
    }

    fn publish(&self, s: &FreezeSession) -> Arc<View> {
        let v = Arc::new(build_view(s));
        *self.view.write().expect("view lock") = v.clone();
        v
    }
}

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Arc<Slot>>>>,
    next_id: Arc<AtomicU64>,
    opts: IpdaOptions,
}

impl AppState {
    pub fn new(opts: IpdaOptions) -> Self {
        AppState { opts, ..Default::default() }
    }

    fn insert(&self, session: FreezeSession) -> String {
        let id = format!("s{}", self.next_id.fetch_add(1, Ordering::Relaxed) + 1);
        self.sessions.write().expect("session table").insert(id.clone(), Arc::new(Slot::new(session)));
        id
    }

    fn slot(&self, id: &str) -> Result<Arc<Slot>, ApiError> {
        self.sessions.read().expect("session table").get(id).cloned().ok_or_else(|| ApiError::no_session(id))
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    /// Server-side log file (.csv, .xes or JSON lines).
    #[serde(default)]
    pub log_path: Option<PathBuf>,
    /// Inline cases.
    #[serde(default)]
    pub traces: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub initial_tree: Option<String>,
    /// Traces the initial tree already accounts for.
    #[serde(default)]
    pub previous: Vec<Vec<String>>,
    #[serde(default)]
    pub ipda: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
    pub tree: TreeView,
    pub metrics: Vec<MetricsRow>,
}

#[derive(Debug, Deserialize)]
pub struct SetFrozen {
    pub paths: Vec<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
pub struct ApplyIncrement {
    pub variant: usize,
    #[serde(default)]
    pub algorithm: Algorithm,
}

async fn create(State(app): State<AppState>, Json(body): Json<CreateSession>) -> Result<Json<Created>, ApiError> {
    let log = match (&body.log_path, &body.traces) {
        (Some(p), None) => import_path(p).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "log", e.to_string()))?,
        (None, Some(ts)) => EventLog::from_traces(ts.iter().map(|t| Trace::from_names(t))),
        _ => return Err(ApiError::new(StatusCode::BAD_REQUEST, "log", "give exactly one of log_path and traces")),
    };
    let initial = match &body.initial_tree {
        Some(text) => Some(parse_tree(text).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "tree", e.to_string()))?),
        None => None,
    };
    let ipda = body.ipda.as_deref().unwrap_or("reference");
    let opts = app.opts.clone();
    let mut session = FreezeSession::new(log, initial, ipda, opts)?;
    for p in &body.previous {
        session.seed_previous(Trace::from_names(p))?;
    }
    let view = build_view(&session);
    let id = app.insert(session);
    Ok(Json(Created { id, tree: view.tree, metrics: view.metrics }))
}

async fn tree(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<TreeView>, ApiError> {
    Ok(Json(app.slot(&id)?.view().tree.clone()))
}

async fn variants(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Vec<VariantView>>, ApiError> {
    Ok(Json(app.slot(&id)?.view().variants.clone()))
}

async fn metrics(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Vec<MetricsRow>>, ApiError> {
    Ok(Json(app.slot(&id)?.view().metrics.clone()))
}

async fn set_frozen(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<SetFrozen>,
) -> Result<Json<TreeView>, ApiError> {
    let slot = app.slot(&id)?;
    let mut s = slot.session.lock().await;
    s.set_frozen(&body.paths)?;
    Ok(Json(slot.publish(&s).tree.clone()))
}

async fn increment(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<ApplyIncrement>,
) -> Result<Json<IncrementResponse>, ApiError> {
    let slot = app.slot(&id)?;
    let mut s = slot.session.lock().await;
    let search = app.opts.search.clone();
    let invariants = (|| -> Result<Invariants, ApiError> {
        s.apply_variant(body.variant, body.algorithm)?;
        let mut previous_accepted = true;
        for p in s.previous() {
            previous_accepted &= fits(s.tree(), p, &search).map_err(SessionError::from)?;
        }
        let frozen_present = s.frozen().items().iter().all(|f| is_subtree(&f.tree, s.tree()));
        Ok(Invariants { previous_accepted, frozen_present })
    })()?;
    let view = slot.publish(&s);
    Ok(Json(IncrementResponse { tree: view.tree.clone(), report: s.report().clone(), invariants }))
}

async fn undo(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<TreeView>, ApiError> {
    let slot = app.slot(&id)?;
    let mut s = slot.session.lock().await;
    s.undo()?;
    Ok(Json(slot.publish(&s).tree.clone()))
}

async fn export(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionSnapshot>, ApiError> {
    let slot = app.slot(&id)?;
    let s = slot.session.lock().await;
    Ok(Json(s.snapshot()))
}

async fn import(State(app): State<AppState>, Json(snap): Json<SessionSnapshot>) -> Result<Json<Created>, ApiError> {
    let opts = app.opts.clone();
    let session = FreezeSession::from_snapshot(&snap, opts)?;
    let view = build_view(&session);
    let id = app.insert(session);
    Ok(Json(Created { id, tree: view.tree, metrics: view.metrics }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/import", post(import))
        .route("/sessions/{id}/tree", get(tree))
        .route("/sessions/{id}/variants", get(variants))
        .route("/sessions/{id}/frozen", put(set_frozen))
        .route("/sessions/{id}/increments", post(increment))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/metrics", get(metrics))
        .route("/sessions/{id}/snapshot", get(export))
        .with_state(state)
}

/// Serves the API on `listener` until the process ends.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}
