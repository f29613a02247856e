//! Hand-written OpenAPI 3 description of the routes in [`crate::router`].

use serde_json::{json, Value};

fn op(summary: &str, params: &[(&str, &str, bool)], body: Option<&str>, responses: &[(&str, &str)]) -> Value {
    let parameters: Vec<Value> = params
        .iter()
        .map(|(name, place, required)| {
            json!({ "name": name, "in": place, "required": required, "schema": { "type": "string" } })
        })
        .collect();
    let mut o = json!({
        "summary": summary,
        "parameters": parameters,
        "responses": responses.iter().map(|(code, d)| (code.to_string(), json!({ "description": d }))).collect::<serde_json::Map<_, _>>(),
    });
    if let Some(schema) = body {
        o["requestBody"] = json!({
            "required": true,
            "content": { "application/json": { "schema": { "$ref": format!("#/components/schemas/{schema}") } } }
        });
    }
    o
}

const ID: (&str, &str, bool) = ("id", "path", true);
const NAME: (&str, &str, bool) = ("name", "path", true);

pub fn document() -> Value {
    json!({
        "openapi": "3.0.3",
        "info": { "title": "affect-engine", "version": env!("CARGO_PKG_VERSION") },
        "paths": {
            "/sessions": { "post": op("Create a session from an inline scenario or a file path", &[], Some("CreateSession"),
                &[("201", "session created"), ("400", "scenario failed to load")]) },
            "/sessions/{id}/characters": { "get": op("List characters and the turn holder", &[ID], None,
                &[("200", "characters"), ("404", "unknown session")]) },
            "/sessions/{id}/characters/{name}/perceive": { "post": op("Deliver an event to one character", &[ID, NAME], Some("Perceive"),
                &[("200", "emotions elicited"), ("404", "unknown session or character"), ("422", "malformed event")]) },
            "/sessions/{id}/characters/{name}/decide": { "get": op("Ranked action candidates", &[ID, NAME, ("layer", "query", false)], None,
                &[("200", "candidates"), ("404", "unknown session or character")]) },
            "/sessions/{id}/characters/{name}/state": { "get": op("Beliefs, goals, emotions and recent memory", &[ID, NAME], None,
                &[("200", "state"), ("404", "unknown session or character")]) },
            "/sessions/{id}/dialogue/options": { "get": op("Dialogue options for a role", &[ID, ("role", "query", true)], None,
                &[("200", "options"), ("404", "unknown session or role"), ("422", "role has no dialogue state")]) },
            "/sessions/{id}/dialogue/graph": { "get": op("Dialogue graph as DOT plus its validation report", &[ID], None,
                &[("200", "graph")]) },
            "/sessions/{id}/choose": { "post": op("Apply a human choice, then run agents until the next human turn", &[ID, ("autostep", "query", false)], Some("Choose"),
                &[("200", "transcript and next options"), ("404", "unknown session or role"), ("409", "entry not valid at the current state")]) },
            "/sessions/{id}/step": { "post": op("Advance the turn pointer once", &[ID], None, &[("200", "step outcome")]) },
            "/sessions/{id}/log": { "get": op("Event log entries from a sequence number", &[ID, ("since", "query", false)], None,
                &[("200", "entries")]) },
        },
        "components": { "schemas": {
            "CreateSession": { "type": "object", "properties": {
                "scenario": { "oneOf": [{ "type": "object" }, { "type": "string" }] },
                "humanRoles": { "type": "array", "items": { "type": "string" } }
            }},
            "Perceive": { "type": "object", "required": ["event"], "properties": { "event": { "type": "string" } } },
            "Choose": { "type": "object", "required": ["role", "entryId"], "properties": {
                "role": { "type": "string" }, "entryId": { "type": "string" }, "target": { "type": "string" }
            }},
        }},
    })
}
