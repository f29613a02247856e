use std::path::PathBuf;
use std::time::Duration;

use affect_engine::decision::DELIBERATIVE;
use affect_engine::scenario::Simulation;
use affect_engine::{Event, Symbol};
use affect_service::{router, views, AppState, DEFAULT_TTL};
use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn sym(s: &str) -> Symbol {
    Symbol::new(s).unwrap()
}

async fn call(state: &AppState, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let builder = Request::builder().method(method).uri(uri);
    let request = match body {
        Some(b) => builder.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => builder.body(Body::empty()),
    }
    .unwrap();
    let response = router(state.clone()).oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

async fn session(state: &AppState, file: &str) -> String {
    let path = scenario(file).to_string_lossy().into_owned();
    let (status, body) = call(state, "POST", "/sessions", Some(json!({ "scenario": path }))).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["sessionId"].as_str().unwrap().to_string()
}

fn state() -> AppState {
    AppState::new(DEFAULT_TTL, None)
}

#[tokio::test]
async fn create_session_inline_and_by_path() {
    let state = state();
    let id = session(&state, "table.json").await;
    assert_eq!(id.len(), 32);
    let inline: Value = serde_json::from_str(&std::fs::read_to_string(scenario("moods.json")).unwrap()).unwrap();
    let (status, body) = call(&state, "POST", "/sessions", Some(json!({ "scenario": inline }))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["humanRoles"], json!(["Player"]));
    assert_eq!(state.session_count(), 2);
}

#[tokio::test]
async fn schema_errors_are_400_with_a_path() {
    let state = state();
    let bad = json!({ "scenario": { "formatVersion": 1, "characters": [{ "name": 5, "beliefs": "x" }] } });
    let (status, body) = call(&state, "POST", "/sessions", Some(bad)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["path"].as_str().unwrap().starts_with("$.characters"), "{body}");
    let (status, _) = call(&state, "POST", "/sessions", Some(json!({}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn unknown_session_and_character_are_404() {
    let state = state();
    let (status, _) = call(&state, "GET", "/sessions/nope/characters", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let id = session(&state, "table.json").await;
    let (status, _) = call(&state, "GET", &format!("/sessions/{id}/characters/Ghost/state"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn characters_match_the_engine_view() {
    let state = state();
    let id = session(&state, "table.json").await;
    let (status, body) = call(&state, "GET", &format!("/sessions/{id}/characters"), None).await;
    assert_eq!(status, StatusCode::OK);
    let sim = Simulation::load(scenario("table.json")).unwrap();
    assert_eq!(body, views::characters(&sim));
}

#[tokio::test]
async fn perceive_and_state_match_direct_calls() {
    let state = state();
    let id = session(&state, "moods.json").await;
    let event = "Event(Property-Change, World, Tired(Agent), True)";
    let (status, body) =
        call(&state, "POST", &format!("/sessions/{id}/characters/Agent/perceive"), Some(json!({ "event": event }))).await;
    assert_eq!(status, StatusCode::OK, "{body}");

    let mut sim = Simulation::load(scenario("moods.json")).unwrap();
    let agent = sim.character_mut(&sym("Agent")).unwrap();
    let perception = agent.perceive(&Event::parse(event, agent.clock()).unwrap()).unwrap();
    assert_eq!(body, views::perception(&perception));

    let (_, body) = call(&state, "GET", &format!("/sessions/{id}/characters/Agent/state"), None).await;
    assert_eq!(body, views::character_state(sim.character(&sym("Agent")).unwrap()));
    assert_eq!(body["memoryTotal"], json!(1));
}

#[tokio::test]
async fn malformed_event_is_422() {
    let state = state();
    let id = session(&state, "table.json").await;
    let (status, _) = call(
        &state,
        "POST",
        &format!("/sessions/{id}/characters/Agent/perceive"),
        Some(json!({ "event": "Event(Action-End, [x], Speak, Player)" })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn decide_defaults_to_deliberative() {
    let state = state();
    let id = session(&state, "table.json").await;
    let (status, body) = call(&state, "GET", &format!("/sessions/{id}/characters/Agent/decide"), None).await;
    assert_eq!(status, StatusCode::OK);
    let sim = Simulation::load(scenario("table.json")).unwrap();
    let layer = sym(DELIBERATIVE);
    assert_eq!(body, views::decision(&layer, &sim.character(&sym("Agent")).unwrap().decide(&layer)));
    assert_eq!(body["candidates"][0]["action"], json!("Speak(s1, s2, -, -)"));
    let (_, reactive) = call(&state, "GET", &format!("/sessions/{id}/characters/Agent/decide?layer=Reactive"), None).await;
    assert_eq!(reactive["candidates"], json!([]));
}

#[tokio::test]
async fn options_then_choose_runs_the_agent() {
    let state = state();
    let id = session(&state, "table.json").await;
    let (_, body) = call(&state, "GET", &format!("/sessions/{id}/dialogue/options?role=Player"), None).await;
    assert_eq!(body["state"], json!("s1"));
    let ids: Vec<&str> = body["options"].as_array().unwrap().iter().map(|o| o["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["d1", "d2"]);

    let (status, body) =
        call(&state, "POST", &format!("/sessions/{id}/choose"), Some(json!({ "role": "Player", "entryId": "d1" }))).await;
    assert_eq!(status, StatusCode::OK, "{body}");

    let mut sim = Simulation::load(scenario("table.json")).unwrap();
    sim.inject_human_choice(&sym("Player"), &sym("d1"), None).unwrap();
    sim.run_until_human(affect_engine::scenario::DEFAULT_MAX_STEPS);
    assert_eq!(body["transcript"], json!(sim.log()));
    assert_eq!(body["options"], json!(sim.options(&sym("Player")).unwrap()));

    let (_, log) = call(&state, "GET", &format!("/sessions/{id}/log?since=1"), None).await;
    assert_eq!(log, views::log_slice(sim.log_since(1), sim.log().len() as u64));
}

#[tokio::test]
async fn stale_choice_is_409_with_options() {
    let state = state();
    let id = session(&state, "table.json").await;
    let (status, body) =
        call(&state, "POST", &format!("/sessions/{id}/choose"), Some(json!({ "role": "Player", "entryId": "d3" }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["state"], json!("s1"));
    assert_eq!(body["options"][0]["id"], json!("d1"));
    let (status, _) =
        call(&state, "POST", &format!("/sessions/{id}/choose"), Some(json!({ "role": "Player", "entryId": "zz" }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn step_reports_outcomes() {
    let state = state();
    let id = session(&state, "table.json").await;
    let (_, body) = call(&state, "POST", &format!("/sessions/{id}/step"), None).await;
    assert_eq!(body["outcome"], json!("human-turn"));
    assert_eq!(body["character"], json!("Player"));
}

#[tokio::test]
async fn dialogue_graph_and_openapi() {
    let state = state();
    let id = session(&state, "table.json").await;
    let (_, body) = call(&state, "GET", &format!("/sessions/{id}/dialogue/graph"), None).await;
    assert!(body["dot"].as_str().unwrap().starts_with("digraph dialogue {"));
    assert_eq!(body["validation"]["unreachable"], json!([]));
    let (status, doc) = call(&state, "GET", "/openapi.json", None).await;
    assert_eq!(status, StatusCode::OK);
    for path in ["/sessions", "/sessions/{id}/choose", "/sessions/{id}/characters/{name}/decide"] {
        assert!(doc["paths"].get(path).is_some(), "{path}");
    }
}

#[tokio::test]
async fn human_roles_override_and_default_scenario() {
    let file = affect_engine::scenario::ScenarioFile::from_path(scenario("table.json")).unwrap();
    let state = AppState::new(DEFAULT_TTL, Some(file));
    let (status, body) = call(&state, "POST", "/sessions", Some(json!({ "humanRoles": [] }))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["humanRoles"], json!([]));
    let id = body["sessionId"].as_str().unwrap();
    let (_, step) = call(&state, "POST", &format!("/sessions/{id}/step"), None).await;
    assert_eq!(step["outcome"], json!("passed"));
    let (_, step) = call(&state, "POST", &format!("/sessions/{id}/step"), None).await;
    assert_eq!(step["outcome"], json!("acted"));
    assert_eq!(step["entry"]["entryId"], json!("d1"));
}

#[tokio::test]
async fn sessions_expire() {
    let state = AppState::new(Duration::from_millis(1), None);
    let id = session(&state, "table.json").await;
    std::thread::sleep(Duration::from_millis(5));
    let (status, _) = call(&state, "GET", &format!("/sessions/{id}/characters"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(state.session_count(), 0);
}
