//! The role-play character: one agent's beliefs, emotions, goals, rules and
//! memory behind a perceive / decide / tick cycle.
//!
//! The character registers its meta-beliefs in its own knowledge base:
//! `Mood([agent])`, `SI([target])`, `SE(...)`, `ValidDialogue(...)` and
//! `IsAgent([x])`. Meta-beliefs that need character state (mood, known
//! agents, exchange instances) share it through reference-counted handles.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appraisal::{AppraisalRule, Appraiser, Goal, GoalSet};
use crate::decision::{decide, Decision, DecisionRule};
use crate::dialogue::DialogueGraph;
use crate::emotional_state::{Emotion, EmotionType, EmotionalState};
use crate::kb::{Belief, KbError, KbView, KnowledgeBase, KnownAgents, MetaBelief};
use crate::reasoners::{AttributionRule, ExchangeTracker, SocialExchange, SocialExchanges, SocialImportance};
use crate::wfn::{unify, Event, EventKind, Name, SubstitutionSet, Symbol};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedEmotion {
    #[serde(rename = "type")]
    pub kind: EmotionType,
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryRecord {
    pub event: Name,
    pub tick: u64,
    #[serde(default)]
    pub emotions: Vec<RecordedEmotion>,
}

/// A character's own emotional state plus the states it models for others.
#[derive(Debug, Clone, Default)]
pub struct AffectState {
    pub own: EmotionalState,
    pub modeled: BTreeMap<Symbol, EmotionalState>,
}

/// Everything needed to build a character.
#[derive(Debug, Clone, Default)]
pub struct CharacterProfile {
    pub name: Option<Symbol>,
    pub body: Option<Symbol>,
    pub beliefs: Vec<Belief>,
    pub goals: Vec<Goal>,
    pub emotional_state: EmotionalState,
    pub appraisal_rules: Vec<AppraisalRule>,
    pub decision_rules: Vec<DecisionRule>,
    pub attribution_rules: Vec<AttributionRule>,
    pub social_exchanges: Vec<SocialExchange>,
    pub memory: Vec<MemoryRecord>,
}

#[derive(Debug, Error)]
pub enum CharacterError {
    #[error("character profile has no name")]
    MissingName,
    #[error("character name must be a plain symbol, got '{0}'")]
    InvalidName(String),
    #[error("belief {index}: {source}")]
    Belief { index: usize, source: KbError },
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("event is not ground: {0}")]
    NotGround(String),
}

/// Outcome of one perception.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Perception {
    /// Emotions accepted into the character's own state, at effective intensity.
    pub emotions: Vec<Emotion>,
    pub warnings: Vec<String>,
}

struct MoodBelief {
    owner: Symbol,
    affect: Arc<RwLock<AffectState>>,
    known: KnownAgents,
}

impl MoodBelief {
    fn mood_of(&self, agent: &Symbol) -> Option<f64> {
        let affect = self.affect.read().expect("affect lock");
        if *agent == self.owner {
            return Some(affect.own.mood_value());
        }
        match affect.modeled.get(agent) {
            Some(state) => Some(state.mood_value()),
            None => self.known.contains(agent).then_some(0.0),
        }
    }
}

impl MetaBelief for MoodBelief {
    fn evaluate(&self, args: &[Name], _view: &KbView<'_>, seed: &SubstitutionSet) -> Vec<(Name, SubstitutionSet)> {
        let [arg] = args else {
            return Vec::new();
        };
        let agents = match arg {
            Name::Symbol(s) => vec![s.clone()],
            Name::Variable(_) => std::iter::once(self.owner.clone())
                .chain(self.known.snapshot().into_iter().filter(|a| *a != self.owner))
                .collect(),
            Name::Composed { .. } => Vec::new(),
        };
        agents
            .into_iter()
            .filter_map(|a| {
                let mood = self.mood_of(&a)?;
                unify(arg, &Name::Symbol(a), seed).map(|s| (Name::number(mood), s))
            })
            .collect()
    }
}

/// `IsAgent([x])`: whether `[x]` is a known agent other than the owner.
struct IsAgentBelief {
    owner: Symbol,
    known: KnownAgents,
}

impl MetaBelief for IsAgentBelief {
    fn evaluate(&self, args: &[Name], _view: &KbView<'_>, seed: &SubstitutionSet) -> Vec<(Name, SubstitutionSet)> {
        match args {
            [Name::Symbol(s)] => {
                let known = *s != self.owner && self.known.contains(s);
                vec![(Name::truth(known), seed.clone())]
            }
            [var @ Name::Variable(_)] => self
                .known
                .snapshot()
                .into_iter()
                .filter(|a| *a != self.owner)
                .filter_map(|a| unify(var, &Name::Symbol(a), seed).map(|s| (Name::truth(true), s)))
                .collect(),
            _ => Vec::new(),
        }
    }
}

pub struct RolePlayCharacter {
    name: Symbol,
    body: Option<Symbol>,
    kb: KnowledgeBase,
    affect: Arc<RwLock<AffectState>>,
    goals: GoalSet,
    appraiser: Appraiser,
    decision_rules: Vec<DecisionRule>,
    exchanges: SocialExchanges,
    known: KnownAgents,
    dialogue: Arc<DialogueGraph>,
    memory: Vec<MemoryRecord>,
    clock: u64,
}

impl std::fmt::Debug for RolePlayCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RolePlayCharacter").field("name", &self.name).field("clock", &self.clock).finish_non_exhaustive()
    }
}

impl RolePlayCharacter {
    pub fn new(profile: CharacterProfile, dialogue: Arc<DialogueGraph>) -> Result<Self, CharacterError> {
        let name = profile.name.ok_or(CharacterError::MissingName)?;
        if name.is_self() || name.is_wildcard() || name.is_literal() {
            return Err(CharacterError::InvalidName(name.to_string()));
        }
        let known = KnownAgents::default();
        let affect = Arc::new(RwLock::new(AffectState { own: profile.emotional_state, modeled: BTreeMap::new() }));
        let exchanges = SocialExchanges::new(profile.social_exchanges, ExchangeTracker::default(), known.clone());

        let mut kb = KnowledgeBase::new(name.clone());
        let builtin: [(&str, Arc<dyn MetaBelief>); 5] = [
            ("Mood", Arc::new(MoodBelief { owner: name.clone(), affect: affect.clone(), known: known.clone() })),
            ("SI", Arc::new(SocialImportance::new(profile.attribution_rules, known.clone()))),
            ("SE", Arc::new(exchanges.clone())),
            ("ValidDialogue", dialogue.clone()),
            ("IsAgent", Arc::new(IsAgentBelief { owner: name.clone(), known: known.clone() })),
        ];
        for (root, procedure) in builtin {
            kb.register_meta_belief(Symbol::new(root).expect("literal"), procedure)?;
        }
        for (index, belief) in profile.beliefs.iter().enumerate() {
            kb.tell_belief(belief).map_err(|source| CharacterError::Belief { index, source })?;
        }
        let mut goals = GoalSet::default();
        for goal in profile.goals {
            goals.insert(goal);
        }
        let mut memory = profile.memory;
        memory.sort_by_key(|r| r.tick);
        let clock = memory.last().map_or(0, |r| r.tick);

        Ok(RolePlayCharacter {
            name,
            body: profile.body,
            kb,
            affect,
            goals,
            appraiser: Appraiser::new(profile.appraisal_rules),
            decision_rules: profile.decision_rules,
            exchanges,
            known,
            dialogue,
            memory,
            clock,
        })
    }

    pub fn name(&self) -> &Symbol {
        &self.name
    }

    pub fn body(&self) -> &Symbol {
        self.body.as_ref().unwrap_or(&self.name)
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    /// Store a belief (perspective `SELF` for the character's own view).
    pub fn tell(&mut self, property: &Name, value: &Name, perspective: &Symbol, certainty: f64) -> Result<(), KbError> {
        self.kb.tell(property, value, perspective, certainty)
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn dialogue(&self) -> &Arc<DialogueGraph> {
        &self.dialogue
    }

    pub fn goals(&self) -> &GoalSet {
        &self.goals
    }

    pub fn decision_rules(&self) -> &[DecisionRule] {
        &self.decision_rules
    }

    pub fn appraisal_rules(&self) -> &[AppraisalRule] {
        self.appraiser.rules()
    }

    pub fn exchanges(&self) -> &SocialExchanges {
        &self.exchanges
    }

    pub fn known_agents(&self) -> Vec<Symbol> {
        self.known.snapshot()
    }

    /// Make another agent known, e.g. when a scenario is loaded.
    pub fn meet(&mut self, agent: &Symbol) {
        if *agent != self.name && !agent.is_self() && self.known.insert(agent.clone()) {
            let disposition = self.affect.read().expect("affect lock").own.disposition().clone();
            self.affect
                .write()
                .expect("affect lock")
                .modeled
                .entry(agent.clone())
                .or_insert_with(|| EmotionalState::new(disposition));
        }
    }

    pub fn emotional_state(&self) -> EmotionalState {
        self.affect.read().expect("affect lock").own.clone()
    }

    pub fn modeled_states(&self) -> BTreeMap<Symbol, EmotionalState> {
        self.affect.read().expect("affect lock").modeled.clone()
    }

    pub fn mood(&self) -> f64 {
        self.affect.read().expect("affect lock").own.mood_value()
    }

    pub fn set_mood(&mut self, mood: f64) {
        self.affect.write().expect("affect lock").own.set_mood(mood);
    }

    pub fn memory(&self) -> &[MemoryRecord] {
        &self.memory
    }

    /// Run the perception pipeline: property changes update beliefs, the
    /// performer becomes known, the event is appraised for the character and
    /// for every other known agent, exchange instances advance and the event
    /// is stored in memory. A warning in one stage does not stop the others.
    pub fn perceive(&mut self, event: &Event) -> Result<Perception, CharacterError> {
        if !event.name().is_ground() {
            return Err(CharacterError::NotGround(event.name().to_string()));
        }
        let mut perception = Perception::default();
        if event.kind() == EventKind::PropertyChange {
            if let Err(e) = self.kb.tell(event.action(), event.target(), &Symbol::self_symbol(), 1.0) {
                perception.warnings.push(format!("belief update failed: {e}"));
            }
        }
        let performer = event.subject().clone();
        self.meet(&performer);

        let own = self.appraiser.appraise(event, &self.name, &self.kb, Some(&mut self.goals));
        perception.warnings.extend(own.warnings);
        let others: Vec<Symbol> = self.known.snapshot().into_iter().filter(|a| *a != self.name).collect();
        let modeled = self.appraiser.appraise_for_others(event, others.iter(), &self.kb);
        {
            let mut affect = self.affect.write().expect("affect lock");
            for emotion in own.emotions {
                if let Some(effective) = affect.own.insert(emotion.clone()) {
                    perception.emotions.push(Emotion { intensity: effective, ..emotion });
                }
            }
            for (agent, emotions) in modeled {
                let disposition = affect.own.disposition().clone();
                let state = affect.modeled.entry(agent).or_insert_with(|| EmotionalState::new(disposition));
                for emotion in emotions {
                    state.insert(emotion);
                }
            }
        }
        perception.warnings.extend(self.exchanges.observe(event));
        self.memory.push(MemoryRecord {
            event: event.name().clone(),
            tick: self.clock,
            emotions: perception
                .emotions
                .iter()
                .map(|e| RecordedEmotion { kind: e.kind, intensity: e.intensity })
                .collect(),
        });
        for warning in &perception.warnings {
            log::warn!("{}: {warning}", self.name);
        }
        Ok(perception)
    }

    /// Ranked candidates from one decision layer.
    pub fn decide(&self, layer: &Symbol) -> Decision {
        let decision = decide(&self.decision_rules, &self.kb.view(&self.name), layer);
        for warning in &decision.warnings {
            log::warn!("{}: {warning}", self.name);
        }
        decision
    }

    pub fn tick(&mut self, n: u64) {
        self.clock += n;
        let mut affect = self.affect.write().expect("affect lock");
        affect.own.decay(n);
        affect.modeled.values_mut().for_each(|s| s.decay(n));
    }

    /// Memory records whose event unifies with `pattern`, in tick order.
    pub fn recall(&self, pattern: &Name) -> Vec<&MemoryRecord> {
        let pattern = pattern.replace_self(&self.name);
        self.memory.iter().filter(|r| unify(&pattern, &r.event, &SubstitutionSet::new()).is_some()).collect()
    }
}
