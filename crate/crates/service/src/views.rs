//! JSON views of engine values. Every response body is built from these, so
//! tests can rebuild the same body by calling the engine directly.

use affect_engine::appraisal::GoalStatus;
use affect_engine::character::{Perception, RolePlayCharacter};
use affect_engine::decision::{ActionCandidate, Decision};
use affect_engine::dialogue::DialogueEntry;
use affect_engine::emotional_state::{Emotion, EmotionalState};
use affect_engine::scenario::{LogEntry, Simulation, StepOutcome};
use affect_engine::Symbol;
use serde_json::{json, Value};

/// Number of memory records included in a state view.
pub const MEMORY_TAIL: usize = 20;

pub fn emotion(e: &Emotion) -> Value {
    json!({
        "type": e.kind,
        "valence": e.valence(),
        "intensity": e.intensity,
        "cause": e.cause,
        "target": e.target,
        "created": e.created,
    })
}

pub fn emotional_state(state: &EmotionalState) -> Value {
    json!({
        "mood": state.mood_value(),
        "emotions": state.emotions().iter().map(emotion).collect::<Vec<_>>(),
        "strongest": state.strongest_emotion().map(emotion),
    })
}

pub fn perception(p: &Perception) -> Value {
    json!({
        "emotions": p.emotions.iter().map(emotion).collect::<Vec<_>>(),
        "warnings": p.warnings,
    })
}

pub fn candidate(c: &ActionCandidate) -> Value {
    json!({
        "action": c.action,
        "target": c.target,
        "score": c.score,
        "rule": c.rule,
        "certainty": c.bindings.certainty(),
        "bindings": c.bindings.to_text_map(),
    })
}

pub fn decision(layer: &Symbol, d: &Decision) -> Value {
    json!({
        "layer": layer,
        "candidates": d.candidates.iter().map(candidate).collect::<Vec<_>>(),
        "warnings": d.warnings,
    })
}

pub fn character_state(c: &RolePlayCharacter) -> Value {
    let memory = c.memory();
    let tail = &memory[memory.len().saturating_sub(MEMORY_TAIL)..];
    let modeled: serde_json::Map<String, Value> =
        c.modeled_states().iter().map(|(agent, state)| (agent.to_string(), emotional_state(state))).collect();
    json!({
        "name": c.name(),
        "body": c.body(),
        "clock": c.clock(),
        "mood": c.mood(),
        "emotionalState": emotional_state(&c.emotional_state()),
        "beliefs": c.kb().beliefs(),
        "goals": c.goals().iter().map(|g| json!({
            "name": g.name,
            "significance": g.significance,
            "likelihood": g.likelihood,
            "status": match g.status {
                GoalStatus::Active => "Active",
                GoalStatus::Succeeded => "Succeeded",
                GoalStatus::Failed => "Failed",
            },
        })).collect::<Vec<_>>(),
        "knownAgents": c.known_agents(),
        "modeled": modeled,
        "exchanges": {
            "active": c.exchanges().tracker().active(),
            "completed": c.exchanges().tracker().completed(),
        },
        "memoryTotal": memory.len(),
        "memory": tail,
    })
}

pub fn characters(sim: &Simulation) -> Value {
    json!({
        "characters": sim.characters().iter().map(|c| json!({
            "name": c.name(),
            "human": sim.is_human(c.name()),
        })).collect::<Vec<_>>(),
        "humanRoles": sim.human_roles(),
        "turn": sim.turn_holder(),
    })
}

pub fn options(role: &Symbol, state: &Symbol, entries: &[DialogueEntry]) -> Value {
    json!({ "role": role, "state": state, "options": entries })
}

pub fn log_slice(entries: &[LogEntry], next: u64) -> Value {
    json!({ "entries": entries, "next": next })
}

pub fn step(outcome: &StepOutcome, sim: &Simulation) -> Value {
    let (kind, who, entry) = match outcome {
        StepOutcome::Acted(e) => ("acted", Some(&e.actor), Some(e)),
        StepOutcome::Passed(who) => ("passed", Some(who), None),
        StepOutcome::HumanTurn(who) => ("human-turn", Some(who), None),
        StepOutcome::NoCharacters => ("empty", None, None),
    };
    json!({ "outcome": kind, "character": who, "entry": entry, "turn": sim.turn_holder() })
}
