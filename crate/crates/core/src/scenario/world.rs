//! World effect rules: property updates triggered by executed actions.

use serde::{Deserialize, Serialize};

use crate::kb::{Condition, KnowledgeBase};
use crate::wfn::{unify, Event, Name, SubstitutionSet, Symbol};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    pub property: Name,
    pub value: Name,
    /// Characters that learn the new value; empty or `*` means everyone.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observers: Vec<Name>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectRule {
    pub event: Name,
    #[serde(default)]
    pub conditions: Vec<Condition>,
    pub effects: Vec<Effect>,
}

/// A ground effect ready to be told to its observers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppliedEffect {
    pub property: Name,
    pub value: Name,
    /// `None` when every character observes the change.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observers: Option<Vec<Symbol>>,
}

impl AppliedEffect {
    pub fn observed_by(&self, agent: &Symbol) -> bool {
        self.observers.as_ref().is_none_or(|o| o.contains(agent))
    }
}

fn ground(effect: &Effect, bindings: &SubstitutionSet) -> Result<AppliedEffect, String> {
    let property = bindings.apply(&effect.property);
    let value = bindings.apply(&effect.value);
    for (what, term) in [("property", &property), ("value", &value)] {
        if !term.is_ground() || term.contains_wildcard() {
            return Err(format!("effect {what} '{term}' is not ground"));
        }
    }
    let mut observers = Vec::new();
    for o in &effect.observers {
        match bindings.apply(o) {
            Name::Symbol(s) if s.is_wildcard() => return Ok(AppliedEffect { property, value, observers: None }),
            Name::Symbol(s) => observers.push(s),
            other => return Err(format!("observer '{other}' is not a ground symbol")),
        }
    }
    let observers = (!observers.is_empty()).then_some(observers);
    Ok(AppliedEffect { property, value, observers })
}

/// Effects of every rule matching `event`. Conditions are checked against
/// `world`; the first satisfying substitution is used. A rule applies all of
/// its effects or, if any of them cannot be grounded, none.
pub fn effects_for(rules: &[EffectRule], event: &Event, world: &KnowledgeBase) -> (Vec<AppliedEffect>, Vec<String>) {
    let mut applied = Vec::new();
    let mut warnings = Vec::new();
    for (index, rule) in rules.iter().enumerate() {
        let Some(seed) = unify(&rule.event, event.name(), &SubstitutionSet::new()) else {
            continue;
        };
        let Some(bindings) = world.evaluate_conditions_with(&rule.conditions, world.owner(), &seed).into_iter().next()
        else {
            continue;
        };
        match rule.effects.iter().map(|e| ground(e, &bindings)).collect::<Result<Vec<_>, _>>() {
            Ok(effects) => applied.extend(effects),
            Err(e) => warnings.push(format!("world rule #{index} ({}): {e}; no effects applied", rule.event)),
        }
    }
    (applied, warnings)
}
