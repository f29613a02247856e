//! HTTP/JSON front end for the simulator.
//!
//! Each session owns one [`Simulation`]. Requests on the same session are
//! serialized by its lock; different sessions proceed concurrently. Idle
//! sessions are dropped after a configurable time to live.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, Instant};

use affect_engine::decision::DELIBERATIVE;
use affect_engine::scenario::{ChoiceError, ScenarioError, ScenarioFile, Simulation, DEFAULT_MAX_STEPS};
use affect_engine::{Event, Symbol};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

pub mod openapi;
pub mod views;

pub const ADDR_ENV: &str = "AFFECT_ENGINE_ADDR";
pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";
pub const DEFAULT_TTL: Duration = Duration::from_secs(30 * 60);

pub struct Session {
    pub simulation: Simulation,
    pub created: Instant,
    pub last_access: Instant,
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    ttl: Duration,
    default_scenario: Option<ScenarioFile>,
}

impl AppState {
    pub fn new(ttl: Duration, default_scenario: Option<ScenarioFile>) -> Self {
        AppState { inner: Arc::new(Inner { sessions: Mutex::new(HashMap::new()), ttl, default_scenario }) }
    }

    fn sessions(&self) -> MutexGuard<'_, HashMap<String, Arc<Mutex<Session>>>> {
        self.inner.sessions.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Drop sessions idle for longer than the TTL; returns how many.
    pub fn purge_expired(&self) -> usize {
        let ttl = self.inner.ttl;
        let mut sessions = self.sessions();
        let before = sessions.len();
        sessions.retain(|_, s| s.lock().map(|s| s.last_access.elapsed() <= ttl).unwrap_or(false));
        before - sessions.len()
    }

    pub fn insert(&self, simulation: Simulation) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let now = Instant::now();
        let session = Session { simulation, created: now, last_access: now };
        self.sessions().insert(id.clone(), Arc::new(Mutex::new(session)));
        id
    }

    pub fn session_count(&self) -> usize {
        self.sessions().len()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.purge_expired();
        self.sessions().get(id).cloned().ok_or_else(|| ApiError::not_found(format!("unknown session '{id}'")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, body: json!({ "error": message.into() }) }
    }

    fn not_found(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, message)
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, message)
    }
}

impl From<ChoiceError> for ApiError {
    fn from(e: ChoiceError) -> Self {
        let status = match &e {
            ChoiceError::UnknownCharacter(_) => StatusCode::NOT_FOUND,
            ChoiceError::Stale { .. } | ChoiceError::UnknownEntry { .. } => StatusCode::CONFLICT,
            ChoiceError::NoDialogueState(_) | ChoiceError::NoTarget => StatusCode::UNPROCESSABLE_ENTITY,
        };
        let state = match &e {
            ChoiceError::Stale { state, .. } => Some(state.clone()),
            _ => None,
        };
        ApiError { status, body: json!({ "error": e.to_string(), "state": state, "options": e.options() }) }
    }
}

impl From<ScenarioError> for ApiError {
    fn from(e: ScenarioError) -> Self {
        let path = match &e {
            ScenarioError::Io { path, .. } | ScenarioError::Schema { path, .. } => path.clone(),
            ScenarioError::Invalid { location, .. } => location.clone(),
        };
        ApiError { status: StatusCode::BAD_REQUEST, body: json!({ "error": e.to_string(), "path": path }) }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T = Json<Value>> = Result<T, ApiError>;

/// Lock a session and refresh its access time.
fn with_session<T>(state: &AppState, id: &str, f: impl FnOnce(&mut Simulation) -> ApiResult<T>) -> ApiResult<T> {
    let session = state.session(id)?;
    let mut guard = session.lock().unwrap_or_else(|e| e.into_inner());
    guard.last_access = Instant::now();
    f(&mut guard.simulation)
}

fn parse_symbol(text: &str) -> ApiResult<Symbol> {
    Symbol::new(text).map_err(|e| ApiError::bad_request(format!("invalid name '{text}': {e}")))
}

fn character_exists(sim: &Simulation, name: &str) -> ApiResult<Symbol> {
    let name = parse_symbol(name)?;
    sim.character(&name).map(|c| c.name().clone()).ok_or_else(|| ApiError::not_found(format!("unknown character '{name}'")))
}

#[derive(Deserialize)]
struct CreateSession {
    #[serde(default)]
    scenario: Option<Value>,
    #[serde(default, rename = "humanRoles")]
    human_roles: Option<Vec<String>>,
}

async fn create_session(State(state): State<AppState>, body: Option<Json<CreateSession>>) -> ApiResult<(StatusCode, Json<Value>)> {
    let request = body.map(|Json(b)| b).unwrap_or(CreateSession { scenario: None, human_roles: None });
    let file = match request.scenario {
        Some(Value::String(path)) => ScenarioFile::from_path(&path)?,
        Some(inline @ Value::Object(_)) => ScenarioFile::from_json(&inline.to_string())?,
        Some(_) => return Err(ApiError::bad_request("'scenario' must be an object or a file path")),
        None => state
            .inner
            .default_scenario
            .clone()
            .ok_or_else(|| ApiError::bad_request("no scenario given and the server has no default"))?,
    };
    let mut simulation = Simulation::from_file(&file)?;
    if let Some(roles) = request.human_roles {
        let roles = roles.iter().map(|r| parse_symbol(r)).collect::<ApiResult<Vec<_>>>()?;
        simulation.set_human_roles(&roles)?;
    }
    let mut body = views::characters(&simulation);
    body["name"] = json!(simulation.name());
    body["warnings"] = json!(simulation.warnings());
    body["validation"] = json!(simulation.validation());
    body["sessionId"] = json!(state.insert(simulation));
    Ok((StatusCode::CREATED, Json(body)))
}

async fn list_characters(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    with_session(&state, &id, |sim| Ok(Json(views::characters(sim))))
}

#[derive(Deserialize)]
struct PerceiveBody {
    event: String,
}

async fn perceive(
    State(state): State<AppState>,
    Path((id, name)): Path<(String, String)>,
    Json(body): Json<PerceiveBody>,
) -> ApiResult {
    with_session(&state, &id, |sim| {
        let name = character_exists(sim, &name)?;
        let character = sim.character_mut(&name).expect("checked");
        let event = Event::parse(&body.event, character.clock())
            .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, format!("invalid event: {e}")))?;
        let perception =
            character.perceive(&event).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
        Ok(Json(views::perception(&perception)))
    })
}

#[derive(Deserialize)]
struct DecideQuery {
    layer: Option<String>,
}

async fn decide(
    State(state): State<AppState>,
    Path((id, name)): Path<(String, String)>,
    Query(q): Query<DecideQuery>,
) -> ApiResult {
    with_session(&state, &id, |sim| {
        let name = character_exists(sim, &name)?;
        let layer = parse_symbol(q.layer.as_deref().unwrap_or(DELIBERATIVE))?;
        let decision = sim.character(&name).expect("checked").decide(&layer);
        Ok(Json(views::decision(&layer, &decision)))
    })
}

async fn character_state(State(state): State<AppState>, Path((id, name)): Path<(String, String)>) -> ApiResult {
    with_session(&state, &id, |sim| {
        let name = character_exists(sim, &name)?;
        Ok(Json(views::character_state(sim.character(&name).expect("checked"))))
    })
}

#[derive(Deserialize)]
struct OptionsQuery {
    role: String,
}

async fn dialogue_options(State(state): State<AppState>, Path(id): Path<String>, Query(q): Query<OptionsQuery>) -> ApiResult {
    with_session(&state, &id, |sim| {
        let role = character_exists(sim, &q.role)?;
        let current = sim.dialogue_state(&role)?;
        Ok(Json(views::options(&role, &current, &sim.options(&role)?)))
    })
}

async fn dialogue_graph(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    with_session(&state, &id, |sim| {
        Ok(Json(json!({
            "dot": sim.dialogue().to_dot(),
            "entries": sim.dialogue().entries(),
            "validation": sim.validation(),
        })))
    })
}

#[derive(Deserialize)]
struct ChooseBody {
    role: String,
    #[serde(rename = "entryId")]
    entry_id: String,
    #[serde(default)]
    target: Option<String>,
}

#[derive(Deserialize)]
struct ChooseQuery {
    autostep: Option<bool>,
}

async fn choose(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<ChooseQuery>,
    Json(body): Json<ChooseBody>,
) -> ApiResult {
    with_session(&state, &id, |sim| {
        let role = character_exists(sim, &body.role)?;
        let entry = parse_symbol(&body.entry_id)?;
        let target = body.target.as_deref().map(parse_symbol).transpose()?;
        let first = sim.log().len() as u64;
        sim.inject_human_choice(&role, &entry, target.as_ref())?;
        if q.autostep.unwrap_or(true) {
            sim.run_until_human(DEFAULT_MAX_STEPS);
        }
        let options = sim.options(&role).unwrap_or_default();
        Ok(Json(json!({
            "transcript": sim.log_since(first),
            "turn": sim.turn_holder(),
            "options": options,
        })))
    })
}

async fn step(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    with_session(&state, &id, |sim| {
        let outcome = sim.step();
        Ok(Json(views::step(&outcome, sim)))
    })
}

#[derive(Deserialize)]
struct LogQuery {
    since: Option<u64>,
}

async fn event_log(State(state): State<AppState>, Path(id): Path<String>, Query(q): Query<LogQuery>) -> ApiResult {
    with_session(&state, &id, |sim| {
        Ok(Json(views::log_slice(sim.log_since(q.since.unwrap_or(0)), sim.log().len() as u64)))
    })
}

async fn openapi_document() -> Json<Value> {
    Json(openapi::document())
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/openapi.json", get(openapi_document))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/characters", get(list_characters))
        .route("/sessions/{id}/characters/{name}/perceive", post(perceive))
        .route("/sessions/{id}/characters/{name}/decide", get(decide))
        .route("/sessions/{id}/characters/{name}/state", get(character_state))
        .route("/sessions/{id}/dialogue/options", get(dialogue_options))
        .route("/sessions/{id}/dialogue/graph", get(dialogue_graph))
        .route("/sessions/{id}/choose", post(choose))
        .route("/sessions/{id}/step", post(step))
        .route("/sessions/{id}/log", get(event_log))
        .with_state(state)
}

/// Serve until the process is stopped, purging idle sessions once a minute.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    let purger = state.clone();
    tokio::spawn(async move {
        let mut interval = tokio::time::interval(Duration::from_secs(60));
        loop {
            interval.tick().await;
            let dropped = purger.purge_expired();
            if dropped > 0 {
                log::info!("expired {dropped} idle session(s)");
            }
        }
    });
    axum::serve(listener, router(state)).await
}
