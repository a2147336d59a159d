//! HTTP/JSON session service around [`TripSession`].
//!
//! Endpoints (all JSON):
//!
//! | method | path                               | purpose                          |
//! |--------|------------------------------------|----------------------------------|
//! | GET    | `/v1/maps`                         | ids of loaded maps               |
//! | GET    | `/v1/maps/{id}`                    | the map document as loaded       |
//! | POST   | `/v1/sessions`                     | `{"map_id"}` → new session       |
//! | GET    | `/v1/sessions/{id}?after=<seq>`    | state snapshot + events after seq|
//! | POST   | `/v1/sessions/{id}/scan`           | `{"payload"}`                    |
//! | POST   | `/v1/sessions/{id}/destination`    | `{"destination","mode"}`         |
//!
//! Sessions live in memory only; a restarted service knows none of the old
//! ids. There is no authentication.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::map::{MapError, MapGraph, NodeId};
use crate::pathfinder::{Route, RouteMode};
use crate::trip::{
    DestinationChoice, InstructionEvent, ScanRejection, TripError, TripSession, TripState,
};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Map { path: PathBuf, source: MapError },
    #[error("map id `{0}` is loaded twice")]
    DuplicateMap(String),
    #[error("no *.json maps found in {0}")]
    Empty(PathBuf),
}

struct LoadedMap {
    graph: Arc<MapGraph>,
    document: String,
}

/// Maps available to the service, fixed after startup.
#[derive(Default)]
pub struct MapStore {
    maps: BTreeMap<String, LoadedMap>,
}

impl MapStore {
    /// Loads every `*.json` file in `dir`. Any invalid map fails the whole
    /// load.
    pub fn load_dir(dir: &Path) -> Result<Self, StoreError> {
        let io = |source| StoreError::Io {
            path: dir.to_path_buf(),
            source,
        };
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err(StoreError::Empty(dir.to_path_buf()));
        }
        let mut store = MapStore::default();
        for path in paths {
            let document = std::fs::read_to_string(&path).map_err(|source| StoreError::Io {
                path: path.clone(),
                source,
            })?;
            store.insert_document(document).map_err(|e| match e {
                StoreError::Map { source, .. } => StoreError::Map { path, source },
                other => other,
            })?;
        }
        Ok(store)
    }

    pub fn insert_document(&mut self, document: String) -> Result<Arc<MapGraph>, StoreError> {
        let graph = MapGraph::from_json_str(&document).map_err(|source| StoreError::Map {
            path: PathBuf::new(),
            source,
        })?;
        let id = graph.map_id().to_string();
        if self.maps.contains_key(&id) {
            return Err(StoreError::DuplicateMap(id));
        }
        let graph = Arc::new(graph);
        self.maps.insert(
            id,
            LoadedMap {
                graph: graph.clone(),
                document,
            },
        );
        Ok(graph)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.maps.keys().map(String::as_str)
    }

    pub fn get(&self, id: &str) -> Option<&Arc<MapGraph>> {
        self.maps.get(id).map(|m| &m.graph)
    }

    pub fn document(&self, id: &str) -> Option<&str> {
        self.maps.get(id).map(|m| m.document.as_str())
    }
}

/// One logged event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    pub timestamp_ms: u64,
    #[serde(flatten)]
    pub event: InstructionEvent,
}

/// Append-only event log with sequence numbers starting at 1.
#[derive(Debug, Default)]
pub struct EventLog {
    records: Vec<EventRecord>,
}

impl EventLog {
    pub fn append(&mut self, events: Vec<InstructionEvent>) -> Vec<EventRecord> {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        let start = self.records.len();
        for event in events {
            let seq = self.records.len() as u64 + 1;
            self.records.push(EventRecord {
                seq,
                timestamp_ms: now,
                event,
            });
        }
        self.records[start..].to_vec()
    }

    pub fn after(&self, seq: u64) -> &[EventRecord] {
        let from = (seq as usize).min(self.records.len());
        &self.records[from..]
    }

    pub fn last_seq(&self) -> u64 {
        self.records.len() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteView {
    pub nodes: Vec<NodeId>,
    pub distance: f64,
    pub turns: u32,
}

impl From<&Route> for RouteView {
    fn from(r: &Route) -> Self {
        RouteView {
            nodes: r.nodes.clone(),
            distance: r.distance,
            turns: r.turns,
        }
    }
}

/// Session snapshot as served by `GET /v1/sessions/{id}`, minus the
/// session id and event list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub map_id: String,
    pub state: String,
    pub current: Option<NodeId>,
    pub last_correct: Option<NodeId>,
    pub next_expected: Option<NodeId>,
    pub destination: Option<NodeId>,
    pub origin: Option<NodeId>,
    pub route: Option<RouteView>,
    pub recovery: Option<RouteView>,
    pub prompt: InstructionEvent,
}

impl StateView {
    pub fn of(session: &TripSession) -> Self {
        let state = session.state();
        let (route, recovery, last_correct) = match state {
            TripState::Navigating {
                route,
                last_correct,
                ..
            } => (Some(route.into()), None, Some(last_correct.clone())),
            TripState::Deviated {
                recovery,
                original,
                resume_index,
                ..
            } => (
                Some(original.into()),
                Some(recovery.into()),
                Some(original.nodes[resume_index - 1].clone()),
            ),
            _ => (None, None, None),
        };
        let destination = match state {
            TripState::Navigating { route, .. } => Some(route.destination().clone()),
            TripState::Deviated { original, .. } => Some(original.destination().clone()),
            TripState::Arrived { destination, .. } => Some(destination.clone()),
            _ => None,
        };
        StateView {
            map_id: session.map().map_id().to_string(),
            state: state.name().to_string(),
            current: session.current_node().cloned(),
            last_correct,
            next_expected: session.expected_next().cloned(),
            destination,
            origin: session.origin().cloned(),
            route,
            recovery,
            prompt: session.current_prompt(),
        }
    }
}

struct SessionEntry {
    session: TripSession,
    log: EventLog,
}

struct Inner {
    maps: MapStore,
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionEntry>>>>,
}

/// Shared service state; cheap to clone.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    pub fn new(maps: MapStore) -> Self {
        AppState {
            inner: Arc::new(Inner {
                maps,
                sessions: RwLock::new(HashMap::new()),
            }),
        }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<SessionEntry>>, ApiError> {
        self.inner
            .sessions
            .read()
            .expect("session table lock")
            .get(id)
            .cloned()
            .ok_or(ApiError::UnknownSession)
    }
}

fn new_session_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}

#[derive(Debug)]
enum ApiError {
    UnknownMap,
    UnknownSession,
    BadRequest(&'static str, String),
    Conflict(String),
    Undecodable {
        kind: &'static str,
        message: String,
        events: Vec<EventRecord>,
    },
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::UnknownMap => (
                StatusCode::NOT_FOUND,
                json!({"error": "unknown_map", "message": "no such map"}),
            ),
            ApiError::UnknownSession => (
                StatusCode::NOT_FOUND,
                json!({"error": "unknown_session", "message": "no such session"}),
            ),
            ApiError::BadRequest(kind, message) => (
                StatusCode::BAD_REQUEST,
                json!({"error": kind, "message": message}),
            ),
            ApiError::Conflict(message) => (
                StatusCode::CONFLICT,
                json!({"error": "invalid_state", "message": message}),
            ),
            ApiError::Undecodable {
                kind,
                message,
                events,
            } => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"error": kind, "message": message, "events": events}),
            ),
        };
        (status, Json(body)).into_response()
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest("bad_request", e.to_string()))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/maps", get(list_maps))
        .route("/v1/maps/{id}", get(get_map))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}", get(get_state))
        .route("/v1/sessions/{id}/scan", post(post_scan))
        .route("/v1/sessions/{id}/destination", post(post_destination))
        .with_state(state)
}

/// Serves until the process is interrupted.
pub async fn serve(maps: MapStore, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(AppState::new(maps)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn list_maps(State(state): State<AppState>) -> Json<serde_json::Value> {
    let ids: Vec<&str> = state.inner.maps.ids().collect();
    Json(json!({ "maps": ids }))
}

async fn get_map(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Response {
    match state.inner.maps.document(&id) {
        Some(doc) => (
            [(header::CONTENT_TYPE, "application/json")],
            doc.to_string(),
        )
            .into_response(),
        None => ApiError::UnknownMap.into_response(),
    }
}

#[derive(Deserialize)]
struct CreateBody {
    map_id: String,
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let body: CreateBody = parse_body(&body)?;
    let map = state
        .inner
        .maps
        .get(&body.map_id)
        .ok_or(ApiError::UnknownMap)?;
    let session = TripSession::new(map.clone());
    let prompt = session.current_prompt();
    let id = new_session_id();
    state
        .inner
        .sessions
        .write()
        .expect("session table lock")
        .insert(
            id.clone(),
            Arc::new(Mutex::new(SessionEntry {
                session,
                log: EventLog::default(),
            })),
        );
    Ok((
        StatusCode::CREATED,
        Json(json!({ "session_id": id, "map_id": body.map_id, "prompt": prompt })),
    )
        .into_response())
}

#[derive(Deserialize)]
struct Cursor {
    after: Option<u64>,
}

async fn get_state(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(cursor): Query<Cursor>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let entry = state.session(&id)?;
    let entry = entry.lock().expect("session lock");
    let mut view = serde_json::to_value(StateView::of(&entry.session)).expect("view serializes");
    let obj = view.as_object_mut().expect("view is an object");
    obj.insert("session_id".into(), json!(id));
    obj.insert("last_seq".into(), json!(entry.log.last_seq()));
    obj.insert(
        "events".into(),
        json!(entry.log.after(cursor.after.unwrap_or(0))),
    );
    Ok(Json(view))
}

#[derive(Deserialize)]
struct ScanBody {
    payload: String,
}

async fn post_scan(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Json<serde_json::Value>, ApiError> {
    let entry = state.session(&id)?;
    let body: ScanBody = parse_body(&body)?;
    let mut entry = entry.lock().expect("session lock");
    match entry.session.scan(&body.payload) {
        Ok(events) => {
            let events = entry.log.append(events);
            Ok(Json(json!({ "events": events })))
        }
        Err(rejection) => {
            let events = entry.log.append(vec![rejection.event()]);
            if let ScanRejection::Unreadable(e) = &rejection {
                Err(ApiError::Undecodable {
                    kind: e.kind(),
                    message: e.to_string(),
                    events,
                })
            } else {
                Ok(Json(
                    json!({ "events": events, "rejected": rejection.kind() }),
                ))
            }
        }
    }
}

#[derive(Deserialize)]
struct DestinationBody {
    destination: String,
    mode: String,
}

async fn post_destination(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Json<serde_json::Value>, ApiError> {
    let entry = state.session(&id)?;
    let body: DestinationBody = parse_body(&body)?;
    let mode: RouteMode = body
        .mode
        .parse()
        .map_err(|e: crate::pathfinder::ParseModeError| {
            ApiError::BadRequest("bad_mode", e.to_string())
        })?;
    let destination = NodeId::new(body.destination)
        .map_err(|e| ApiError::BadRequest("unknown_node", e.to_string()))?;
    let mut entry = entry.lock().expect("session lock");
    let events = entry
        .session
        .select_destination(&DestinationChoice { destination, mode })
        .map_err(|e| match e {
            TripError::NotAtNode => ApiError::Conflict(e.to_string()),
            TripError::UnknownNode(_) => ApiError::BadRequest("unknown_node", e.to_string()),
            TripError::NotDestination(_) => ApiError::BadRequest("not_destination", e.to_string()),
            TripError::Route(_) => ApiError::BadRequest("no_route", e.to_string()),
        })?;
    let route = StateView::of(&entry.session).route;
    let events = entry.log.append(events);
    Ok(Json(json!({ "route": route, "events": events })))
}
