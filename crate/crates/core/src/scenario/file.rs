//! On-disk scenario schema (JSON, `formatVersion` 1).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::appraisal::{AppraisalRule, AppraisalVariable, AppraisalVariableKind, Goal};
use crate::character::{CharacterProfile, MemoryRecord};
use crate::decision::DecisionRule;
use crate::dialogue::DialogueEntry;
use crate::emotional_state::{Emotion, EmotionType, EmotionalDisposition, EmotionalState};
use crate::kb::{Belief, Condition};
use crate::reasoners::{AttributionRule, SocialExchange};
use crate::wfn::{Name, Symbol};

use super::world::EffectRule;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
}

impl ScenarioError {
    fn invalid(location: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Invalid { location: location.into(), message: message.into() }
    }
}

fn format_version() -> u32 {
    FORMAT_VERSION
}

fn self_symbol() -> Symbol {
    Symbol::self_symbol()
}

fn one() -> f64 {
    1.0
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioFile {
    #[serde(default = "format_version")]
    pub format_version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub characters: Vec<CharacterSpec>,
    #[serde(default)]
    pub dialogue: Vec<DialogueEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub start_states: Vec<Symbol>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub world_rules: Vec<EffectRule>,
    #[serde(default)]
    pub world: WorldSpec,
    /// Unrecognised top-level keys, kept for round-tripping.
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WorldSpec {
    /// Facts told to every character and to the world mirror.
    #[serde(default)]
    pub beliefs: Vec<BeliefSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefSpec {
    pub name: Name,
    pub value: Name,
    #[serde(default = "self_symbol")]
    pub perspective: Symbol,
    #[serde(default = "one")]
    pub certainty: f64,
}

impl From<&BeliefSpec> for Belief {
    fn from(b: &BeliefSpec) -> Belief {
        Belief { name: b.name.clone(), value: b.value.clone(), perspective: b.perspective.clone(), certainty: b.certainty }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalSpec {
    pub name: Symbol,
    pub significance: f64,
    pub likelihood: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EmotionalStateSpec {
    #[serde(default)]
    pub mood: f64,
    #[serde(default)]
    pub thresholds: BTreeMap<EmotionType, f64>,
    #[serde(default)]
    pub half_lives: BTreeMap<EmotionType, f64>,
    #[serde(default)]
    pub emotions: Vec<Emotion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppraisalVariableSpec {
    pub kind: String,
    /// Goal name, required for `GoalLikelihood`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<Symbol>,
    pub value: Name,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppraisalRuleSpec {
    pub event: Name,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Name>,
    #[serde(default)]
    pub variables: Vec<AppraisalVariableSpec>,
    #[serde(default)]
    pub conditions: Vec<Condition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CharacterSpec {
    pub name: Symbol,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<Symbol>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub human: bool,
    #[serde(default)]
    pub beliefs: Vec<BeliefSpec>,
    #[serde(default)]
    pub goals: Vec<GoalSpec>,
    #[serde(default)]
    pub emotional_state: EmotionalStateSpec,
    #[serde(default)]
    pub appraisal_rules: Vec<AppraisalRuleSpec>,
    #[serde(default)]
    pub decision_rules: Vec<DecisionRule>,
    #[serde(default)]
    pub attribution_rules: Vec<AttributionRule>,
    #[serde(default)]
    pub social_exchanges: Vec<SocialExchange>,
    #[serde(default)]
    pub memory: Vec<MemoryRecord>,
}

fn parse_kind(kind: &str, goal: Option<&Symbol>, location: &str) -> Result<AppraisalVariableKind, ScenarioError> {
    let normalized: String = kind.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
    Ok(match normalized.as_str() {
        "desirability" => AppraisalVariableKind::Desirability,
        "desirabilityforothers" => AppraisalVariableKind::DesirabilityForOthers,
        "praiseworthiness" => AppraisalVariableKind::Praiseworthiness,
        "like" => AppraisalVariableKind::Like,
        "goallikelihood" => match goal {
            Some(goal) => AppraisalVariableKind::GoalLikelihood(goal.clone()),
            None => return Err(ScenarioError::invalid(location, "GoalLikelihood needs a 'goal'")),
        },
        _ => return Err(ScenarioError::invalid(location, format!("unknown appraisal variable kind '{kind}'"))),
    })
}

/// A term that must be a number once bound: constants are checked now.
fn check_numeric(value: &Name, location: &str, range: std::ops::RangeInclusive<f64>) -> Result<(), ScenarioError> {
    match value {
        Name::Variable(_) => Ok(()),
        other => match other.as_number() {
            Some(v) if range.contains(&v) => Ok(()),
            Some(v) => Err(ScenarioError::invalid(location, format!("value {v} outside [{}, {}]", range.start(), range.end()))),
            None => Err(ScenarioError::invalid(location, format!("'{other}' must be a number or a variable"))),
        },
    }
}

impl CharacterSpec {
    /// Convert to a character profile, checking constant values.
    pub fn to_profile(&self, index: usize) -> Result<CharacterProfile, ScenarioError> {
        let at = |rest: String| format!("characters[{index}] ({}).{rest}", self.name);
        let mut goals = Vec::new();
        for (i, g) in self.goals.iter().enumerate() {
            goals.push(
                Goal::new(g.name.clone(), g.significance, g.likelihood)
                    .map_err(|e| ScenarioError::invalid(at(format!("goals[{i}]")), e.to_string()))?,
            );
        }
        let mut appraisal_rules = Vec::new();
        for (i, rule) in self.appraisal_rules.iter().enumerate() {
            let mut variables = Vec::new();
            for (j, v) in rule.variables.iter().enumerate() {
                let location = at(format!("appraisalRules[{i}].variables[{j}]"));
                let kind = parse_kind(&v.kind, v.goal.as_ref(), &location)?;
                let range = match kind {
                    AppraisalVariableKind::GoalLikelihood(_) => 0.0..=1.0,
                    _ => -10.0..=10.0,
                };
                check_numeric(&v.value, &location, range)?;
                variables.push(AppraisalVariable { kind, value: v.value.clone() });
            }
            appraisal_rules.push(AppraisalRule {
                event: rule.event.clone(),
                target: rule.target.clone(),
                variables,
                conditions: rule.conditions.clone(),
            });
        }
        for (i, rule) in self.decision_rules.iter().enumerate() {
            check_numeric(&rule.priority, &at(format!("decisionRules[{i}].priority")), 0.0..=f64::MAX)?;
        }
        let es = &self.emotional_state;
        for (kind, t) in &es.thresholds {
            if !(0.0..=10.0).contains(t) {
                return Err(ScenarioError::invalid(at(format!("emotionalState.thresholds.{kind}")), "threshold outside [0, 10]"));
            }
        }
        for (kind, h) in &es.half_lives {
            if h.is_nan() || *h <= 0.0 {
                return Err(ScenarioError::invalid(at(format!("emotionalState.halfLives.{kind}")), "half-life must be positive"));
            }
        }
        if !(-10.0..=10.0).contains(&es.mood) {
            return Err(ScenarioError::invalid(at("emotionalState.mood".into()), "mood outside [-10, 10]"));
        }
        let disposition = EmotionalDisposition { thresholds: es.thresholds.clone(), half_lives: es.half_lives.clone() };
        Ok(CharacterProfile {
            name: Some(self.name.clone()),
            body: self.body.clone(),
            beliefs: self.beliefs.iter().map(Belief::from).collect(),
            goals,
            emotional_state: EmotionalState::from_parts(disposition, es.mood, es.emotions.clone()),
            appraisal_rules,
            decision_rules: self.decision_rules.clone(),
            attribution_rules: self.attribution_rules.clone(),
            social_exchanges: self.social_exchanges.clone(),
            memory: self.memory.clone(),
        })
    }
}

impl ScenarioFile {
    /// Parse JSON text; schema errors carry the JSON path of the offending value.
    pub fn from_json(text: &str) -> Result<ScenarioFile, ScenarioError> {
        let deserializer = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(deserializer).map_err(|e| {
            let path = e.path().to_string();
            ScenarioError::Schema { path: if path == "." { "$".into() } else { format!("$.{path}") }, message: e.into_inner().to_string() }
        })?;
        if file.format_version != FORMAT_VERSION {
            return Err(ScenarioError::invalid(
                "$.formatVersion",
                format!("unsupported format version {} (expected {FORMAT_VERSION})", file.format_version),
            ));
        }
        Ok(file)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<ScenarioFile, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
        ScenarioFile::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "formatVersion": 1,
        "name": "Minimal",
        "editorLayout": {"zoom": 2},
        "characters": [{
            "name": "Sam",
            "beliefs": [{"name": "RapportLevel(SELF, John)", "value": 5}],
            "decisionRules": [{"action": "Wave", "target": "John", "priority": 2}],
            "appraisalRules": [{
                "event": "Event(Action-End, [x], Smile, SELF)",
                "target": "[x]",
                "variables": [{"kind": "Desirability", "value": "[d]"}],
                "conditions": ["RapportLevel(SELF, [x]) = [d]"]
            }],
            "emotionalState": {"mood": 1, "thresholds": {"Happy-For": 2}}
        }]
    }"#;

    #[test]
    fn parses_and_preserves_unknown_keys() {
        let file = ScenarioFile::from_json(MINIMAL).unwrap();
        assert_eq!(file.characters[0].beliefs[0].value, Name::number(5.0));
        assert_eq!(file.characters[0].beliefs[0].perspective, Symbol::self_symbol());
        assert_eq!(file.extra["editorLayout"]["zoom"], 2);
        let again = ScenarioFile::from_json(&file.to_json()).unwrap();
        assert_eq!(again, file);
        let profile = file.characters[0].to_profile(0).unwrap();
        assert_eq!(profile.emotional_state.mood_value(), 1.0);
        assert_eq!(profile.emotional_state.disposition().threshold(EmotionType::HappyFor), 2.0);
    }

    #[test]
    fn schema_errors_carry_json_path() {
        let bad = MINIMAL.replace(r#""priority": 2"#, r#""priority": "2("#);
        match ScenarioFile::from_json(&bad) {
            Err(ScenarioError::Schema { path, .. }) => assert_eq!(path, "$.characters[0].decisionRules[0].priority"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_numeric_priority_names_the_rule() {
        let bad = MINIMAL.replace(r#""priority": 2"#, r#""priority": "high""#);
        let file = ScenarioFile::from_json(&bad).unwrap();
        let err = file.characters[0].to_profile(0).unwrap_err().to_string();
        assert!(err.contains("decisionRules[0].priority"), "{err}");
    }

    #[test]
    fn rejects_unknown_variable_kind_and_version() {
        let bad = MINIMAL.replace(r#""kind": "Desirability""#, r#""kind": "Surprise""#);
        let file = ScenarioFile::from_json(&bad).unwrap();
        assert!(file.characters[0].to_profile(0).is_err());
        let bad = MINIMAL.replace(r#""formatVersion": 1"#, r#""formatVersion": 7"#);
        assert!(matches!(ScenarioFile::from_json(&bad), Err(ScenarioError::Invalid { .. })));
    }
}
