use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::kb::{Condition, KbView, KnownAgents, MetaBelief};
use crate::wfn::{unify, Event, EventKind, Name, SubstitutionSet, Symbol};

use super::target_candidates;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCondition {
    pub mode: Symbol,
    #[serde(default)]
    pub conditions: Vec<Condition>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialExchange {
    pub name: Symbol,
    pub target: Name,
    pub steps: Vec<Symbol>,
    #[serde(rename = "startingConditions", default)]
    pub starting_conditions: Vec<Condition>,
    #[serde(rename = "modeConditions", default)]
    pub mode_conditions: Vec<ModeCondition>,
}

impl SocialExchange {
    /// Modes in first-appearance order.
    pub fn modes(&self) -> Vec<Symbol> {
        let mut modes: Vec<Symbol> = Vec::new();
        for mc in &self.mode_conditions {
            if !modes.contains(&mc.mode) {
                modes.push(mc.mode.clone());
            }
        }
        modes
    }
}

/// One running exchange; even step indices are performed by the initiator,
/// odd ones by the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeInstance {
    pub name: Symbol,
    pub initiator: Symbol,
    pub target: Symbol,
    #[serde(rename = "nextStep")]
    pub next_step: usize,
}

type Key = (Symbol, Symbol, Symbol);

#[derive(Debug, Default)]
struct TrackerState {
    active: BTreeMap<Key, usize>,
    completed: Vec<ExchangeInstance>,
}

/// Exchange bookkeeping keyed by (exchange name, initiator, target).
#[derive(Debug, Clone, Default)]
pub struct ExchangeTracker(Arc<RwLock<TrackerState>>);

/// State of a pair from one performer's side.
enum Turn {
    Fresh,
    Next(usize),
    Waiting,
}

impl ExchangeTracker {
    pub fn active(&self) -> Vec<ExchangeInstance> {
        let state = self.0.read().expect("tracker lock");
        state
            .active
            .iter()
            .map(|((name, initiator, target), next)| ExchangeInstance {
                name: name.clone(),
                initiator: initiator.clone(),
                target: target.clone(),
                next_step: *next,
            })
            .collect()
    }

    pub fn completed(&self) -> Vec<ExchangeInstance> {
        self.0.read().expect("tracker lock").completed.clone()
    }

    fn turn(&self, name: &Symbol, performer: &Symbol, other: &Symbol) -> Turn {
        let state = self.0.read().expect("tracker lock");
        if let Some(&i) = state.active.get(&(name.clone(), performer.clone(), other.clone())) {
            return if i % 2 == 0 { Turn::Next(i) } else { Turn::Waiting };
        }
        if let Some(&i) = state.active.get(&(name.clone(), other.clone(), performer.clone())) {
            return if i % 2 == 1 { Turn::Next(i) } else { Turn::Waiting };
        }
        Turn::Fresh
    }

    /// Record a performed step. Returns a warning when the step is out of
    /// order or performed by the wrong agent; nothing changes in that case.
    pub fn advance(&self, exchange: &SocialExchange, performer: &Symbol, other: &Symbol, step: &Symbol) -> Result<(), String> {
        let name = &exchange.name;
        let mut state = self.0.write().expect("tracker lock");
        let forward = (name.clone(), performer.clone(), other.clone());
        let backward = (name.clone(), other.clone(), performer.clone());
        let (key, index) = match (state.active.get(&forward), state.active.get(&backward)) {
            (Some(&i), _) if i % 2 == 0 => (forward, i),
            (_, Some(&i)) if i % 2 == 1 => (backward, i),
            (None, None) => (forward, 0),
            _ => return Err(format!("{name}: {performer} is not expected to act next with {other}")),
        };
        if exchange.steps.get(index) != Some(step) {
            return Err(format!(
                "{name}: step '{step}' by {performer} out of order (expected {})",
                exchange.steps.get(index).map(|s| s.to_string()).unwrap_or_default()
            ));
        }
        if index + 1 >= exchange.steps.len() {
            let (name, initiator, target) = key.clone();
            state.active.remove(&key);
            state.completed.push(ExchangeInstance { name, initiator, target, next_step: index + 1 });
        } else {
            state.active.insert(key, index + 1);
        }
        Ok(())
    }
}

/// The exchange catalogue of one character plus its instance tracker.
#[derive(Debug, Clone, Default)]
pub struct SocialExchanges {
    exchanges: Vec<SocialExchange>,
    tracker: ExchangeTracker,
    known: KnownAgents,
}

impl SocialExchanges {
    pub fn new(exchanges: Vec<SocialExchange>, tracker: ExchangeTracker, known: KnownAgents) -> Self {
        SocialExchanges { exchanges, tracker, known }
    }

    pub fn exchanges(&self) -> &[SocialExchange] {
        &self.exchanges
    }

    pub fn tracker(&self) -> &ExchangeTracker {
        &self.tracker
    }

    /// Advance instances for an event whose action reads `Name(Step[, Mode])`.
    pub fn observe(&self, event: &Event) -> Vec<String> {
        if event.kind() != EventKind::ActionEnd {
            return Vec::new();
        }
        let action = event.action();
        let (Some(root), Some(step), Some(other)) =
            (action.root(), action.terms().first().and_then(Name::as_symbol), event.target().as_symbol())
        else {
            return Vec::new();
        };
        self.exchanges
            .iter()
            .filter(|e| &e.name == root && e.steps.contains(step))
            .filter_map(|e| self.tracker.advance(e, event.subject(), other, step).err())
            .collect()
    }

    /// `(desire, bindings)` for every exchange, target, expected step and mode
    /// matching the patterns.
    pub fn se(&self, args: &[Name], view: &KbView<'_>, seed: &SubstitutionSet) -> Vec<(Name, SubstitutionSet)> {
        let [name_pat, target_pat, step_pat, mode_pat] = args else {
            return Vec::new();
        };
        let me = view.agent().clone();
        let mut out = Vec::new();
        for exchange in &self.exchanges {
            let Some(s_name) = unify(name_pat, &Name::Symbol(exchange.name.clone()), seed) else {
                continue;
            };
            let rule_target = exchange.target.replace_self(&me);
            for target in target_candidates(&s_name.apply(target_pat), view, &self.known) {
                if target == me {
                    continue;
                }
                let target_name = Name::Symbol(target.clone());
                let Some(s_target) = unify(target_pat, &target_name, &s_name) else {
                    continue;
                };
                let Some(local) = unify(&rule_target, &target_name, &SubstitutionSet::new()) else {
                    continue;
                };
                let index = match self.tracker.turn(&exchange.name, &me, &target) {
                    Turn::Fresh => {
                        if view.evaluate_conditions(&exchange.starting_conditions, &local).is_empty() {
                            continue;
                        }
                        0
                    }
                    Turn::Next(i) => i,
                    Turn::Waiting => continue,
                };
                let Some(step) = exchange.steps.get(index) else {
                    continue;
                };
                let Some(s_step) = unify(step_pat, &Name::Symbol(step.clone()), &s_target) else {
                    continue;
                };
                for mode in exchange.modes() {
                    let Some(s_mode) = unify(mode_pat, &Name::Symbol(mode.clone()), &s_step) else {
                        continue;
                    };
                    let satisfied: Vec<f64> = exchange
                        .mode_conditions
                        .iter()
                        .filter(|mc| mc.mode == mode && !view.evaluate_conditions(&mc.conditions, &local).is_empty())
                        .map(|mc| mc.value)
                        .collect();
                    if !satisfied.is_empty() {
                        out.push((Name::number(satisfied.iter().sum()), s_mode));
                    }
                }
            }
        }
        out
    }
}

impl MetaBelief for SocialExchanges {
    fn evaluate(&self, args: &[Name], view: &KbView<'_>, seed: &SubstitutionSet) -> Vec<(Name, SubstitutionSet)> {
        self.se(args, view, seed)
    }
}
