//! Turn-based simulator.
//!
//! A turn pointer walks the characters in file order. On an agent's turn the
//! best candidate from the `Reactive` and `Deliberative` layers is executed
//! (ties go to `Reactive`); a human's turn waits for
//! [`Simulation::inject_human_choice`]. An executed action becomes an
//! `Action-End` event: world effects are applied, every character perceives
//! the event, and all characters advance one tick.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::character::{RecordedEmotion, RolePlayCharacter};
use crate::decision::{ActionCandidate, DELIBERATIVE, REACTIVE};
use crate::dialogue::{speak_action, DialogueEntry, DialogueGraph, ValidationReport};
use crate::kb::KnowledgeBase;
use crate::wfn::{Event, EventError, Name, Symbol};

use super::file::{ScenarioError, ScenarioFile};
use super::world::{effects_for, AppliedEffect, EffectRule};

/// Safety cap for [`Simulation::run_until_human`].
pub const DEFAULT_MAX_STEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterEmotions {
    pub character: Symbol,
    pub emotions: Vec<RecordedEmotion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LogEntry {
    pub seq: u64,
    pub tick: u64,
    pub actor: Symbol,
    pub target: Symbol,
    pub action: Name,
    pub event: Name,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub utterance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry_id: Option<Symbol>,
    pub effects: Vec<AppliedEffect>,
    /// Emotions accepted by each character, omitting characters with none.
    pub emotions: Vec<CharacterEmotions>,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum StepOutcome {
    Acted(LogEntry),
    /// The agent had no candidate; the turn moved on.
    Passed(Symbol),
    /// A human holds the turn; nothing happened.
    HumanTurn(Symbol),
    NoCharacters,
}

impl StepOutcome {
    pub fn entry(&self) -> Option<&LogEntry> {
        match self {
            StepOutcome::Acted(e) => Some(e),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChoiceError {
    #[error("unknown character '{0}'")]
    UnknownCharacter(String),
    #[error("'{0}' has no DialogueState belief")]
    NoDialogueState(Symbol),
    #[error("unknown dialogue entry '{id}'")]
    UnknownEntry { id: String, options: Vec<DialogueEntry> },
    #[error("entry '{id}' does not start at the current state {state}")]
    Stale { id: String, state: Symbol, options: Vec<DialogueEntry> },
    #[error("no listener available")]
    NoTarget,
}

impl ChoiceError {
    /// Valid options at the current state, when the error carries them.
    pub fn options(&self) -> &[DialogueEntry] {
        match self {
            ChoiceError::UnknownEntry { options, .. } | ChoiceError::Stale { options, .. } => options,
            _ => &[],
        }
    }
}

pub struct Simulation {
    name: String,
    description: String,
    characters: Vec<RolePlayCharacter>,
    human: Vec<bool>,
    dialogue: Arc<DialogueGraph>,
    validation: ValidationReport,
    world_rules: Vec<EffectRule>,
    world: KnowledgeBase,
    log: Vec<LogEntry>,
    warnings: Vec<String>,
    tick: u64,
    turn: usize,
}

impl std::fmt::Debug for Simulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulation")
            .field("name", &self.name)
            .field("characters", &self.characters.iter().map(|c| c.name()).collect::<Vec<_>>())
            .field("tick", &self.tick)
            .finish_non_exhaustive()
    }
}

fn dialogue_state_property(role: &Symbol) -> Name {
    Name::composed(Symbol::new("DialogueState").expect("literal"), vec![Name::Symbol(role.clone())])
}

impl Simulation {
    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Simulation, ScenarioError> {
        Simulation::from_file(&ScenarioFile::from_path(path)?)
    }

    pub fn from_json(text: &str) -> Result<Simulation, ScenarioError> {
        Simulation::from_file(&ScenarioFile::from_json(text)?)
    }

    pub fn from_file(file: &ScenarioFile) -> Result<Simulation, ScenarioError> {
        let mut warnings = Vec::new();
        let dialogue = Arc::new(DialogueGraph::new(file.dialogue.clone()));
        let validation = dialogue.validate(&file.start_states);
        let states = dialogue.states();
        for s in file.start_states.iter().filter(|s| !states.contains(s)) {
            warnings.push(format!("start state '{s}' does not appear in the dialogue"));
        }
        if !validation.unreachable.is_empty() {
            warnings.push(format!("unreachable dialogue states: {}", join(&validation.unreachable)));
        }
        if !validation.duplicate_ids.is_empty() {
            warnings.push(format!("duplicate dialogue ids: {}", join(&validation.duplicate_ids)));
        }
        if !validation.leaving_end.is_empty() {
            warnings.push(format!("entries leaving End: {}", join(&validation.leaving_end)));
        }

        let mut characters: Vec<RolePlayCharacter> = Vec::new();
        let mut human = Vec::new();
        for (index, spec) in file.characters.iter().enumerate() {
            if characters.iter().any(|c| c.name() == &spec.name) {
                return Err(ScenarioError::Invalid {
                    location: format!("characters[{index}].name"),
                    message: format!("duplicate character '{}'", spec.name),
                });
            }
            let profile = spec.to_profile(index)?;
            let character = RolePlayCharacter::new(profile, dialogue.clone()).map_err(|e| ScenarioError::Invalid {
                location: format!("characters[{index}] ({})", spec.name),
                message: e.to_string(),
            })?;
            for rule in character.appraisal_rules() {
                for v in &rule.variables {
                    if let crate::appraisal::AppraisalVariableKind::GoalLikelihood(goal) = &v.kind {
                        if character.goals().get(goal).is_none() {
                            warnings.push(format!("{}: appraisal rule refers to unknown goal '{goal}'", spec.name));
                        }
                    }
                }
            }
            characters.push(character);
            human.push(spec.human);
        }

        let mut world = KnowledgeBase::new(Symbol::new("World").expect("literal"));
        for (i, belief) in file.world.beliefs.iter().enumerate() {
            let location = format!("world.beliefs[{i}]");
            let invalid = |e: crate::kb::KbError| ScenarioError::Invalid { location: location.clone(), message: e.to_string() };
            world.tell(&belief.name, &belief.value, &Symbol::self_symbol(), belief.certainty).map_err(invalid)?;
            for c in &mut characters {
                c.tell(&belief.name, &belief.value, &belief.perspective, belief.certainty).map_err(invalid)?;
            }
        }

        Ok(Simulation {
            name: file.name.clone(),
            description: file.description.clone(),
            characters,
            human,
            dialogue,
            validation,
            world_rules: file.world_rules.clone(),
            world,
            log: Vec::new(),
            warnings,
            tick: 0,
            turn: 0,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn characters(&self) -> &[RolePlayCharacter] {
        &self.characters
    }

    fn index_of(&self, name: &Symbol) -> Option<usize> {
        self.characters.iter().position(|c| c.name() == name)
    }

    pub fn character(&self, name: &Symbol) -> Option<&RolePlayCharacter> {
        self.index_of(name).map(|i| &self.characters[i])
    }

    pub fn character_mut(&mut self, name: &Symbol) -> Option<&mut RolePlayCharacter> {
        self.index_of(name).map(|i| &mut self.characters[i])
    }

    pub fn human_roles(&self) -> Vec<Symbol> {
        self.characters.iter().zip(&self.human).filter(|(_, h)| **h).map(|(c, _)| c.name().clone()).collect()
    }

    pub fn is_human(&self, name: &Symbol) -> bool {
        self.index_of(name).is_some_and(|i| self.human[i])
    }

    /// Replace the set of human-controlled roles (empty for spectating).
    pub fn set_human_roles(&mut self, roles: &[Symbol]) -> Result<(), ChoiceError> {
        if let Some(unknown) = roles.iter().find(|r| self.index_of(r).is_none()) {
            return Err(ChoiceError::UnknownCharacter(unknown.to_string()));
        }
        for (c, h) in self.characters.iter().zip(self.human.iter_mut()) {
            *h = roles.contains(c.name());
        }
        Ok(())
    }

    pub fn turn_holder(&self) -> Option<&Symbol> {
        self.characters.get(self.turn).map(|c| c.name())
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn dialogue(&self) -> &Arc<DialogueGraph> {
        &self.dialogue
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.validation
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn world(&self) -> &KnowledgeBase {
        &self.world
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    /// Log entries with `seq >= since`.
    pub fn log_since(&self, since: u64) -> &[LogEntry] {
        let start = self.log.partition_point(|e| e.seq < since);
        &self.log[start..]
    }

    /// The event log as JSON lines.
    pub fn log_jsonl(&self) -> String {
        self.log.iter().map(|e| serde_json::to_string(e).expect("log serializes") + "\n").collect()
    }

    /// A role's current dialogue state, read from its own beliefs.
    pub fn dialogue_state(&self, role: &Symbol) -> Result<Symbol, ChoiceError> {
        let character = self.character(role).ok_or_else(|| ChoiceError::UnknownCharacter(role.to_string()))?;
        character
            .kb()
            .value_of(&dialogue_state_property(role))
            .and_then(|v| v.as_symbol().cloned())
            .ok_or_else(|| ChoiceError::NoDialogueState(role.clone()))
    }

    /// Dialogue entries available to `role` at its current state.
    pub fn options(&self, role: &Symbol) -> Result<Vec<DialogueEntry>, ChoiceError> {
        let state = self.dialogue_state(role)?;
        Ok(self.dialogue.from_state(&state).into_iter().cloned().collect())
    }

    /// Best candidate over both layers; `Reactive` wins ties.
    pub fn best_candidate(&self, name: &Symbol) -> Option<ActionCandidate> {
        let character = self.character(name)?;
        let reactive = character.decide(&Symbol::new(REACTIVE).expect("literal")).candidates.into_iter().next();
        let deliberative = character.decide(&Symbol::new(DELIBERATIVE).expect("literal")).candidates.into_iter().next();
        match (reactive, deliberative) {
            (Some(r), Some(d)) => Some(if d.score > r.score { d } else { r }),
            (r, d) => r.or(d),
        }
    }

    /// Let the turn holder act, if it is an agent.
    pub fn step(&mut self) -> StepOutcome {
        let Some(actor) = self.turn_holder().cloned() else {
            return StepOutcome::NoCharacters;
        };
        if self.human[self.turn] {
            return StepOutcome::HumanTurn(actor);
        }
        self.turn = (self.turn + 1) % self.characters.len();
        match self.best_candidate(&actor) {
            Some(candidate) => {
                let entry = self.execute(&actor, candidate.action, candidate.target).expect("candidates are ground");
                StepOutcome::Acted(entry)
            }
            None => StepOutcome::Passed(actor),
        }
    }

    /// Step until a human holds the turn, a full round passes without any
    /// action, or `max_steps` actions have been taken.
    pub fn run_until_human(&mut self, max_steps: usize) -> Vec<LogEntry> {
        let mut out = Vec::new();
        let mut passes = 0;
        while out.len() < max_steps {
            match self.step() {
                StepOutcome::Acted(entry) => {
                    passes = 0;
                    out.push(entry);
                }
                StepOutcome::Passed(_) => {
                    passes += 1;
                    if passes >= self.characters.len() {
                        break;
                    }
                }
                StepOutcome::HumanTurn(_) | StepOutcome::NoCharacters => break,
            }
        }
        out
    }

    /// Execute a dialogue entry chosen for `role`. The listener defaults to
    /// the first other character in file order. The turn passes to the
    /// character after `role`.
    pub fn inject_human_choice(&mut self, role: &Symbol, entry_id: &Symbol, target: Option<&Symbol>) -> Result<LogEntry, ChoiceError> {
        let index = self.index_of(role).ok_or_else(|| ChoiceError::UnknownCharacter(role.to_string()))?;
        let state = self.dialogue_state(role)?;
        let options: Vec<DialogueEntry> = self.dialogue.from_state(&state).into_iter().cloned().collect();
        let Some(entry) = self.dialogue.get(entry_id).cloned() else {
            return Err(ChoiceError::UnknownEntry { id: entry_id.to_string(), options });
        };
        if entry.current_state != state {
            return Err(ChoiceError::Stale { id: entry_id.to_string(), state, options });
        }
        let target = match target {
            Some(t) if self.index_of(t).is_some() => t.clone(),
            Some(t) => return Err(ChoiceError::UnknownCharacter(t.to_string())),
            None => self.characters.iter().map(|c| c.name()).find(|n| *n != role).cloned().ok_or(ChoiceError::NoTarget)?,
        };
        let action = speak_action(&entry.current_state, &entry.next_state, &entry.meaning_tags()[0], &entry.style_tags()[0]);
        let logged = self.execute(role, action, target).expect("dialogue actions are ground");
        self.turn = (index + 1) % self.characters.len();
        Ok(logged)
    }

    /// Run an action through effects, perception and time.
    pub fn execute(&mut self, actor: &Symbol, action: Name, target: Symbol) -> Result<LogEntry, EventError> {
        let event = Event::action_end(actor.clone(), action.clone(), Name::Symbol(target.clone()), self.tick)?;
        let (effects, warnings) = effects_for(&self.world_rules, &event, &self.world);
        for w in warnings {
            log::warn!("{w}");
            self.warnings.push(w);
        }
        for effect in &effects {
            if let Err(e) = self.world.tell(&effect.property, &effect.value, &Symbol::self_symbol(), 1.0) {
                self.warnings.push(format!("world mirror: {e}"));
            }
            for c in self.characters.iter_mut().filter(|c| effect.observed_by(c.name())) {
                if let Err(e) = c.tell(&effect.property, &effect.value, &Symbol::self_symbol(), 1.0) {
                    let warning = format!("{}: effect {} = {}: {e}", c.name(), effect.property, effect.value);
                    self.warnings.push(warning);
                }
            }
        }
        let mut emotions = Vec::new();
        for c in &mut self.characters {
            let perception = c.perceive(&event).expect("executed events are ground");
            if !perception.emotions.is_empty() {
                emotions.push(CharacterEmotions {
                    character: c.name().clone(),
                    emotions: perception
                        .emotions
                        .iter()
                        .map(|e| RecordedEmotion { kind: e.kind, intensity: e.intensity })
                        .collect(),
                });
            }
        }
        for c in &mut self.characters {
            c.tick(1);
        }
        let entry = self.dialogue.entry_for_action(&action);
        let logged = LogEntry {
            seq: self.log.len() as u64,
            tick: self.tick,
            actor: actor.clone(),
            target,
            action,
            event: event.name().clone(),
            utterance: entry.map(|e| e.utterance.clone()),
            entry_id: entry.map(|e| e.id.clone()),
            effects,
            emotions,
        };
        self.tick += 1;
        self.log.push(logged.clone());
        Ok(logged)
    }
}

fn join(symbols: &[Symbol]) -> String {
    symbols.iter().map(Symbol::as_str).collect::<Vec<_>>().join(", ")
}
