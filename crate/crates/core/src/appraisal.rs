//! Appraisal: rules map perceived events to appraisal variables, and affect
//! derivation maps those variables to OCC emotions.
//!
//! Affect derivation, per emotion group:
//!
//! | variables            | emotions                                             | intensity            |
//! |----------------------|------------------------------------------------------|----------------------|
//! | desirability d       | Joy / Distress                                       | \|d\|                |
//! | d + for-others o     | Happy-For, Pity, Gloating, Resentment                | (\|d\| + \|o\|) / 2  |
//! | praiseworthiness p   | Pride / Shame (own act), Admiration / Reproach       | \|p\|                |
//! | d + p (same sign)    | Gratification / Remorse (own), Gratitude / Anger     | (\|d\| + \|p\|) / 2  |
//! | like l               | Love / Hate                                          | \|l\|                |
//! | goal likelihood      | Hope, Fear, Relief, Disappointment, Satisfaction, Fears-Confirmed | see [`Goal::update`] |

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotional_state::{Emotion, EmotionType};
use crate::kb::{Condition, KnowledgeBase};
use crate::wfn::{unify, Event, Name, SubstitutionSet, Symbol};

/// Likelihood shifts of at least this size count as major.
pub const MAJOR_SHIFT: f64 = 0.5;
pub const APPRAISAL_RANGE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AppraisalVariableKind {
    Desirability,
    DesirabilityForOthers,
    Praiseworthiness,
    Like,
    GoalLikelihood(Symbol),
}

impl fmt::Display for AppraisalVariableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppraisalVariableKind::Desirability => f.write_str("Desirability"),
            AppraisalVariableKind::DesirabilityForOthers => f.write_str("DesirabilityForOthers"),
            AppraisalVariableKind::Praiseworthiness => f.write_str("Praiseworthiness"),
            AppraisalVariableKind::Like => f.write_str("Like"),
            AppraisalVariableKind::GoalLikelihood(goal) => write!(f, "GoalLikelihood({goal})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppraisalVariable {
    pub kind: AppraisalVariableKind,
    /// A numeric constant or a variable bound by the event or conditions.
    pub value: Name,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppraisalRule {
    pub event: Name,
    pub target: Option<Name>,
    pub variables: Vec<AppraisalVariable>,
    pub conditions: Vec<Condition>,
}

/// Resolved appraisal variable values for one rule activation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AppraisalValues {
    pub desirability: Option<f64>,
    pub desirability_for_others: Option<f64>,
    pub praiseworthiness: Option<f64>,
    pub like: Option<f64>,
    pub goal_likelihoods: Vec<(Symbol, f64)>,
}

/// An emotion type and intensity before it is attached to a cause.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Elicited {
    pub kind: EmotionType,
    pub intensity: f64,
}

fn elicit(out: &mut Vec<Elicited>, kind: EmotionType, intensity: f64) {
    if intensity > 0.0 {
        out.push(Elicited { kind, intensity });
    }
}

/// OCC affect derivation; `actor` performed the appraised event and
/// `perspective` is the agent doing the appraising.
pub fn derive_affect(values: &AppraisalValues, actor: &Symbol, perspective: &Symbol) -> Vec<Elicited> {
    use EmotionType::*;
    let own_act = actor == perspective;
    let nonzero = |v: Option<f64>| v.filter(|x| *x != 0.0);
    let d = nonzero(values.desirability);
    let o = nonzero(values.desirability_for_others);
    let p = nonzero(values.praiseworthiness);
    let l = nonzero(values.like);
    let mut out = Vec::new();

    if let Some(d) = d {
        elicit(&mut out, if d > 0.0 { Joy } else { Distress }, d.abs());
        if let Some(o) = o {
            let kind = match (o > 0.0, d > 0.0) {
                (true, true) => HappyFor,
                (false, false) => Pity,
                (false, true) => Gloating,
                (true, false) => Resentment,
            };
            elicit(&mut out, kind, (d.abs() + o.abs()) / 2.0);
        }
    }
    if let Some(p) = p {
        let kind = match (own_act, p > 0.0) {
            (true, true) => Pride,
            (true, false) => Shame,
            (false, true) => Admiration,
            (false, false) => Reproach,
        };
        elicit(&mut out, kind, p.abs());
        if let Some(d) = d {
            let kind = match (own_act, d > 0.0, p > 0.0) {
                (true, true, true) => Some(Gratification),
                (false, true, true) => Some(Gratitude),
                (true, false, false) => Some(Remorse),
                (false, false, false) => Some(Anger),
                _ => None,
            };
            if let Some(kind) = kind {
                elicit(&mut out, kind, (d.abs() + p.abs()) / 2.0);
            }
        }
    }
    if let Some(l) = l {
        elicit(&mut out, if l > 0.0 { Love } else { Hate }, l.abs());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GoalStatus {
    Active,
    Succeeded,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GoalError {
    #[error("goal significance {0} outside [0, 10]")]
    Significance(f64),
    #[error("goal likelihood {0} outside [0, 1]")]
    Likelihood(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Goal {
    pub name: Symbol,
    pub significance: f64,
    pub likelihood: f64,
    pub status: GoalStatus,
}

fn status_for(likelihood: f64) -> GoalStatus {
    if likelihood >= 1.0 {
        GoalStatus::Succeeded
    } else if likelihood <= 0.0 {
        GoalStatus::Failed
    } else {
        GoalStatus::Active
    }
}

impl Goal {
    pub fn new(name: Symbol, significance: f64, likelihood: f64) -> Result<Goal, GoalError> {
        if !(0.0..=10.0).contains(&significance) {
            return Err(GoalError::Significance(significance));
        }
        if !(0.0..=1.0).contains(&likelihood) {
            return Err(GoalError::Likelihood(likelihood));
        }
        Ok(Goal { name, significance, likelihood, status: status_for(likelihood) })
    }

    pub fn is_confirmed(&self) -> bool {
        self.status != GoalStatus::Active
    }

    /// Move the likelihood and return the prospect-based emotions it causes.
    ///
    /// A shift below [`MAJOR_SHIFT`] gives Hope (up) or Fear (down), a larger
    /// one Relief or Disappointment, with intensity `|shift| * significance`.
    /// Reaching 1 or 0 also gives Satisfaction or Fears-Confirmed at full
    /// significance and confirms the goal.
    pub fn update(&mut self, likelihood: f64) -> Vec<Elicited> {
        if self.is_confirmed() {
            return Vec::new();
        }
        let likelihood = likelihood.clamp(0.0, 1.0);
        let shift = likelihood - self.likelihood;
        let mut out = Vec::new();
        if shift > 0.0 {
            let kind = if shift < MAJOR_SHIFT { EmotionType::Hope } else { EmotionType::Relief };
            elicit(&mut out, kind, shift * self.significance);
        } else if shift < 0.0 {
            let kind = if -shift < MAJOR_SHIFT { EmotionType::Fear } else { EmotionType::Disappointment };
            elicit(&mut out, kind, -shift * self.significance);
        }
        self.likelihood = likelihood;
        self.status = status_for(likelihood);
        match self.status {
            GoalStatus::Succeeded => elicit(&mut out, EmotionType::Satisfaction, self.significance),
            GoalStatus::Failed => elicit(&mut out, EmotionType::FearsConfirmed, self.significance),
            GoalStatus::Active => {}
        }
        out.iter_mut().for_each(|e| e.intensity = e.intensity.min(APPRAISAL_RANGE));
        out
    }
}

pub fn update_goal(goal: &mut Goal, likelihood: f64) -> Vec<Elicited> {
    goal.update(likelihood)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GoalSet {
    goals: BTreeMap<Symbol, Goal>,
}

impl GoalSet {
    pub fn insert(&mut self, goal: Goal) {
        self.goals.insert(goal.name.clone(), goal);
    }

    pub fn get(&self, name: &Symbol) -> Option<&Goal> {
        self.goals.get(name)
    }

    pub fn get_mut(&mut self, name: &Symbol) -> Option<&mut Goal> {
        self.goals.get_mut(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Goal> {
        self.goals.values()
    }

    pub fn is_empty(&self) -> bool {
        self.goals.is_empty()
    }
}

/// Result of appraising one event from one perspective.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Appraisal {
    pub emotions: Vec<Emotion>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Appraiser {
    rules: Vec<AppraisalRule>,
}

impl Appraiser {
    pub fn new(rules: Vec<AppraisalRule>) -> Self {
        Appraiser { rules }
    }

    pub fn rules(&self) -> &[AppraisalRule] {
        &self.rules
    }

    /// Appraise `event` as `perspective` (`SELF` in rules means that agent).
    ///
    /// Goal likelihood variables update `goals` when given; modeled agents
    /// are appraised without goals.
    pub fn appraise(
        &self,
        event: &Event,
        perspective: &Symbol,
        kb: &KnowledgeBase,
        mut goals: Option<&mut GoalSet>,
    ) -> Appraisal {
        let agent = if perspective.is_self() { kb.owner().clone() } else { perspective.clone() };
        let view = kb.view(&agent);
        let actor = event.subject().clone();
        let mut result = Appraisal::default();

        for (index, rule) in self.rules.iter().enumerate() {
            let pattern = rule.event.replace_self(&agent);
            let Some(seed) = unify(&pattern, event.name(), &SubstitutionSet::new()) else {
                continue;
            };
            for bindings in view.evaluate_conditions(&rule.conditions, &seed) {
                let values = match resolve_values(rule, &bindings) {
                    Ok(values) => values,
                    Err(warning) => {
                        result.warnings.push(format!("appraisal rule #{index} ({}): {warning}", rule.event));
                        continue;
                    }
                };
                let target = rule
                    .target
                    .as_ref()
                    .map(|t| bindings.apply(&t.replace_self(&agent)))
                    .and_then(|t| t.as_symbol().cloned())
                    .unwrap_or_else(|| actor.clone());
                let mut elicited = derive_affect(&values, &actor, &agent);
                if let Some(goals) = goals.as_deref_mut() {
                    for (goal_name, likelihood) in &values.goal_likelihoods {
                        match goals.get_mut(goal_name) {
                            Some(goal) => elicited.extend(goal.update(*likelihood)),
                            None => result.warnings.push(format!("appraisal rule #{index}: unknown goal '{goal_name}'")),
                        }
                    }
                }
                result.emotions.extend(elicited.into_iter().map(|e| {
                    Emotion::new(e.kind, e.intensity, event.name().clone(), target.clone(), event.timestamp)
                }));
            }
        }
        result
    }

    /// Appraise the same event as each other agent, using the beliefs held
    /// under their perspectives.
    pub fn appraise_for_others<'a>(
        &self,
        event: &Event,
        agents: impl IntoIterator<Item = &'a Symbol>,
        kb: &KnowledgeBase,
    ) -> BTreeMap<Symbol, Vec<Emotion>> {
        agents
            .into_iter()
            .filter(|a| *a != kb.owner() && !a.is_self())
            .map(|agent| (agent.clone(), self.appraise(event, agent, kb, None).emotions))
            .collect()
    }
}

fn resolve_values(rule: &AppraisalRule, bindings: &SubstitutionSet) -> Result<AppraisalValues, String> {
    let mut values = AppraisalValues::default();
    for variable in &rule.variables {
        let resolved = bindings.apply(&variable.value);
        let Some(number) = resolved.as_number() else {
            return Err(format!("{} value '{}' did not resolve to a number", variable.kind, resolved));
        };
        match &variable.kind {
            AppraisalVariableKind::GoalLikelihood(goal) => {
                values.goal_likelihoods.push((goal.clone(), number.clamp(0.0, 1.0)));
            }
            kind => {
                let number = number.clamp(-APPRAISAL_RANGE, APPRAISAL_RANGE);
                let slot = match kind {
                    AppraisalVariableKind::Desirability => &mut values.desirability,
                    AppraisalVariableKind::DesirabilityForOthers => &mut values.desirability_for_others,
                    AppraisalVariableKind::Praiseworthiness => &mut values.praiseworthiness,
                    AppraisalVariableKind::Like => &mut values.like,
                    AppraisalVariableKind::GoalLikelihood(_) => unreachable!(),
                };
                *slot = Some(number);
            }
        }
    }
    Ok(values)
}
