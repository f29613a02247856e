//! Perspective-aware belief store.
//!
//! Beliefs are `property = value` pairs held under a perspective: the owner's
//! own view, or what the owner believes another agent believes. Queries are
//! answered by unification against stored beliefs, or by registered
//! meta-beliefs: procedures evaluated at query time (`Mood(SELF)`,
//! `ValidDialogue(...)`, ...). `ToM([agent], [belief])` is built in and
//! re-asks `[belief]` under `[agent]`'s perspective.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::wfn::{unify, Name, ParseError, SubstitutionSet, Symbol};

pub const TOM: &str = "ToM";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KbError {
    #[error("belief {what} '{name}' must be ground")]
    NotGround { what: &'static str, name: String },
    #[error("'{0}' is a reserved meta-belief and cannot be stored")]
    ReservedRoot(String),
    #[error("certainty {0} outside [0, 1]")]
    CertaintyOutOfRange(f64),
    #[error("meta-belief '{0}' is already registered")]
    DuplicateMetaBelief(String),
    #[error("a property must be a symbol or composed name, got '{0}'")]
    InvalidProperty(String),
}

/// A stored belief as seen from the outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Belief {
    pub name: Name,
    pub value: Name,
    pub perspective: Symbol,
    pub certainty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operator {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Operator {
    pub fn as_str(self) -> &'static str {
        match self {
            Operator::Eq => "=",
            Operator::Ne => "!=",
            Operator::Lt => "<",
            Operator::Le => "<=",
            Operator::Gt => ">",
            Operator::Ge => ">=",
        }
    }

    fn compare(self, a: f64, b: f64) -> bool {
        match self {
            Operator::Eq => a == b,
            Operator::Ne => a != b,
            Operator::Lt => a < b,
            Operator::Le => a <= b,
            Operator::Gt => a > b,
            Operator::Ge => a >= b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConditionError {
    #[error("condition '{0}' has no comparison operator")]
    MissingOperator(String),
    #[error("condition '{text}': {source}")]
    Term { text: String, source: ParseError },
}

/// `lhs op rhs`, e.g. `Has([object]) = True` or `Mood(SELF) < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub lhs: Name,
    pub op: Operator,
    pub rhs: Name,
}

impl Condition {
    pub fn new(lhs: Name, op: Operator, rhs: Name) -> Self {
        Condition { lhs, op, rhs }
    }

    pub fn parse(text: &str) -> Result<Condition, ConditionError> {
        let bytes = text.as_bytes();
        let mut depth = 0i32;
        let mut split = None;
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'(' | b'[' => depth += 1,
                b')' | b']' => depth -= 1,
                b'=' | b'<' | b'>' | b'!' if depth == 0 => {
                    let two = bytes.get(i + 1) == Some(&b'=');
                    let op = match (b, two) {
                        (b'!', true) => Operator::Ne,
                        (b'<', true) => Operator::Le,
                        (b'>', true) => Operator::Ge,
                        (b'<', false) => Operator::Lt,
                        (b'>', false) => Operator::Gt,
                        (b'=', _) => Operator::Eq,
                        _ => continue,
                    };
                    let width = if two && b != b'=' { 2 } else { 1 };
                    split = Some((i, width, op));
                    break;
                }
                _ => {}
            }
        }
        let (at, width, op) = split.ok_or_else(|| ConditionError::MissingOperator(text.to_string()))?;
        let term = |s: &str| {
            Name::parse(s).map_err(|source| ConditionError::Term { text: text.to_string(), source })
        };
        let lhs = term(&text[..at])?;
        let rhs = term(&text[at + width..])?;
        Ok(Condition { lhs, op, rhs })
    }

    pub fn replace_self(&self, agent: &Symbol) -> Condition {
        Condition { lhs: self.lhs.replace_self(agent), op: self.op, rhs: self.rhs.replace_self(agent) }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.as_str(), self.rhs)
    }
}

impl FromStr for Condition {
    type Err = ConditionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::parse(s)
    }
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Condition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Condition::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// A procedure answering queries for a reserved root symbol.
///
/// Evaluators read the knowledge base through [`KbView`] and never write it.
pub trait MetaBelief: Send + Sync {
    fn evaluate(&self, args: &[Name], view: &KbView<'_>, seed: &SubstitutionSet) -> Vec<(Name, SubstitutionSet)>;

    /// Whether arguments that are themselves meta-belief queries are
    /// evaluated before this procedure runs.
    fn evaluates_arguments(&self) -> bool {
        true
    }
}

impl<F> MetaBelief for F
where
    F: Fn(&[Name], &KbView<'_>, &SubstitutionSet) -> Vec<(Name, SubstitutionSet)> + Send + Sync,
{
    fn evaluate(&self, args: &[Name], view: &KbView<'_>, seed: &SubstitutionSet) -> Vec<(Name, SubstitutionSet)> {
        self(args, view, seed)
    }
}

#[derive(Clone, Default)]
pub struct MetaBeliefRegistry {
    procedures: BTreeMap<Symbol, Arc<dyn MetaBelief>>,
}

impl MetaBeliefRegistry {
    pub fn register(&mut self, root: Symbol, procedure: Arc<dyn MetaBelief>) -> Result<(), KbError> {
        if root.as_str().eq_ignore_ascii_case(TOM) || self.procedures.contains_key(&root) {
            return Err(KbError::DuplicateMetaBelief(root.to_string()));
        }
        self.procedures.insert(root, procedure);
        Ok(())
    }

    pub fn get(&self, root: &Symbol) -> Option<&Arc<dyn MetaBelief>> {
        self.procedures.get(root)
    }

    pub fn contains(&self, root: &Symbol) -> bool {
        root.as_str().eq_ignore_ascii_case(TOM) || self.procedures.contains_key(root)
    }

    pub fn roots(&self) -> impl Iterator<Item = &Symbol> {
        self.procedures.keys()
    }
}

impl fmt::Debug for MetaBeliefRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.procedures.keys()).finish()
    }
}

/// Names of the agents a character knows about, shared with the meta-beliefs
/// that enumerate agents.
#[derive(Debug, Clone, Default)]
pub struct KnownAgents(Arc<RwLock<BTreeSet<Symbol>>>);

impl KnownAgents {
    pub fn insert(&self, agent: Symbol) -> bool {
        self.0.write().expect("agents lock").insert(agent)
    }

    pub fn contains(&self, agent: &Symbol) -> bool {
        self.0.read().expect("agents lock").contains(agent)
    }

    pub fn snapshot(&self) -> Vec<Symbol> {
        self.0.read().expect("agents lock").iter().cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: Name,
    certainty: f64,
}

#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    owner: Symbol,
    perspectives: BTreeMap<Symbol, BTreeMap<Name, Entry>>,
    registry: MetaBeliefRegistry,
}

impl KnowledgeBase {
    pub fn new(owner: Symbol) -> Self {
        KnowledgeBase { owner, perspectives: BTreeMap::new(), registry: MetaBeliefRegistry::default() }
    }

    pub fn owner(&self) -> &Symbol {
        &self.owner
    }

    pub fn registry(&self) -> &MetaBeliefRegistry {
        &self.registry
    }

    pub fn register_meta_belief(&mut self, root: Symbol, procedure: Arc<dyn MetaBelief>) -> Result<(), KbError> {
        self.registry.register(root, procedure)
    }

    fn agent_of(&self, perspective: &Symbol) -> Symbol {
        if perspective.is_self() {
            self.owner.clone()
        } else {
            perspective.clone()
        }
    }

    /// Store or overwrite `property = value` under `perspective`.
    ///
    /// `SELF` inside the property or value is read as the perspective's agent.
    pub fn tell(&mut self, property: &Name, value: &Name, perspective: &Symbol, certainty: f64) -> Result<(), KbError> {
        if !(0.0..=1.0).contains(&certainty) || certainty.is_nan() {
            return Err(KbError::CertaintyOutOfRange(certainty));
        }
        let agent = self.agent_of(perspective);
        let property = property.replace_self(&agent);
        let value = value.replace_self(&agent);
        let root = property.root().ok_or_else(|| KbError::InvalidProperty(property.to_string()))?;
        if root.is_literal() {
            return Err(KbError::InvalidProperty(property.to_string()));
        }
        if self.registry.contains(root) {
            return Err(KbError::ReservedRoot(root.to_string()));
        }
        if !property.is_ground() || property.contains_wildcard() {
            return Err(KbError::NotGround { what: "property", name: property.to_string() });
        }
        if !value.is_ground() || value.contains_wildcard() {
            return Err(KbError::NotGround { what: "value", name: value.to_string() });
        }
        self.perspectives.entry(agent).or_default().insert(property, Entry { value, certainty });
        Ok(())
    }

    pub fn tell_belief(&mut self, belief: &Belief) -> Result<(), KbError> {
        self.tell(&belief.name, &belief.value, &belief.perspective, belief.certainty)
    }

    /// Remove a stored belief; returns whether it existed.
    pub fn retract(&mut self, property: &Name, perspective: &Symbol) -> bool {
        let agent = self.agent_of(perspective);
        let property = property.replace_self(&agent);
        self.perspectives.get_mut(&agent).is_some_and(|m| m.remove(&property).is_some())
    }

    /// All stored beliefs; the owner's own view is reported as `SELF`.
    pub fn beliefs(&self) -> Vec<Belief> {
        let mut out = Vec::new();
        for (agent, entries) in &self.perspectives {
            let perspective = if *agent == self.owner { Symbol::self_symbol() } else { agent.clone() };
            for (name, entry) in entries {
                out.push(Belief {
                    name: name.clone(),
                    value: entry.value.clone(),
                    perspective: perspective.clone(),
                    certainty: entry.certainty,
                });
            }
        }
        out
    }

    /// Agents (other than the owner) the KB holds beliefs for.
    pub fn modeled_perspectives(&self) -> Vec<Symbol> {
        self.perspectives.keys().filter(|a| **a != self.owner).cloned().collect()
    }

    pub fn view(&self, perspective: &Symbol) -> KbView<'_> {
        KbView { kb: self, agent: self.agent_of(perspective) }
    }

    pub fn ask(&self, property: &Name, perspective: &Symbol, seed: &SubstitutionSet) -> Vec<(Name, SubstitutionSet)> {
        self.view(perspective).ask(property, seed)
    }

    pub fn evaluate_conditions(&self, conditions: &[Condition], perspective: &Symbol) -> Vec<SubstitutionSet> {
        self.view(perspective).evaluate_conditions(conditions, &SubstitutionSet::new())
    }

    pub fn evaluate_conditions_with(
        &self,
        conditions: &[Condition],
        perspective: &Symbol,
        seed: &SubstitutionSet,
    ) -> Vec<SubstitutionSet> {
        self.view(perspective).evaluate_conditions(conditions, seed)
    }

    /// Single ground value of a property in the owner's view, if unambiguous.
    pub fn value_of(&self, property: &Name) -> Option<Name> {
        let results = self.ask(property, &self.owner.clone(), &SubstitutionSet::new());
        match results.as_slice() {
            [(value, _)] => Some(value.clone()),
            _ => None,
        }
    }
}


/// Read-only access to a knowledge base from one perspective.
#[derive(Clone)]
pub struct KbView<'a> {
    kb: &'a KnowledgeBase,
    agent: Symbol,
}

#[derive(Debug, Clone)]
enum Operand {
    Value(Name),
    Unbound(Name),
}

impl<'a> KbView<'a> {
    pub fn knowledge_base(&self) -> &'a KnowledgeBase {
        self.kb
    }

    /// The agent `SELF` denotes under this perspective.
    pub fn agent(&self) -> &Symbol {
        &self.agent
    }

    pub fn is_own(&self) -> bool {
        self.agent == self.kb.owner
    }

    /// The same knowledge base seen from another agent's perspective.
    pub fn at(&self, agent: &Symbol) -> KbView<'a> {
        KbView { kb: self.kb, agent: self.kb.agent_of(agent) }
    }

    pub fn ask(&self, property: &Name, seed: &SubstitutionSet) -> Vec<(Name, SubstitutionSet)> {
        let property = seed.apply(property).replace_self(&self.agent);
        let Some(root) = property.root() else {
            return Vec::new();
        };
        if root.as_str().eq_ignore_ascii_case(TOM) {
            return self.ask_tom(property.terms(), seed);
        }
        if let Some(procedure) = self.kb.registry.get(root) {
            if !procedure.evaluates_arguments() {
                return procedure.evaluate(property.terms(), self, seed);
            }
            return self
                .expand_arguments(property.terms(), seed)
                .into_iter()
                .flat_map(|(args, s)| procedure.evaluate(&args, self, &s))
                .collect();
        }
        match &property {
            Name::Composed { root, terms } => self
                .expand_arguments(terms, seed)
                .into_iter()
                .flat_map(|(args, s)| self.lookup(&Name::Composed { root: root.clone(), terms: args }, &s))
                .collect(),
            _ => self.lookup(&property, seed),
        }
    }

    fn is_meta_query(&self, name: &Name) -> bool {
        matches!(name, Name::Composed { root, .. } if self.kb.registry.contains(root))
    }

    /// Evaluate nested meta-belief arguments, one branch per value.
    fn expand_arguments(&self, terms: &[Name], seed: &SubstitutionSet) -> Vec<(Vec<Name>, SubstitutionSet)> {
        let mut branches = vec![(Vec::with_capacity(terms.len()), seed.clone())];
        for term in terms {
            if self.is_meta_query(term) {
                branches = branches
                    .into_iter()
                    .flat_map(|(args, s)| {
                        self.ask(term, &s).into_iter().map(move |(value, s2)| {
                            let mut args = args.clone();
                            args.push(value);
                            (args, s2)
                        })
                    })
                    .collect();
            } else {
                for (args, _) in &mut branches {
                    args.push(term.clone());
                }
            }
        }
        branches
    }

    fn lookup(&self, property: &Name, seed: &SubstitutionSet) -> Vec<(Name, SubstitutionSet)> {
        let Some(entries) = self.kb.perspectives.get(&self.agent) else {
            return Vec::new();
        };
        let found = |entry: &Entry, mut s: SubstitutionSet| {
            s.scale_certainty(entry.certainty);
            (entry.value.clone(), s)
        };
        if property.is_ground() && !property.contains_wildcard() {
            return entries.get(property).map(|e| found(e, seed.clone())).into_iter().collect();
        }
        entries
            .iter()
            .filter_map(|(key, entry)| unify(property, key, seed).map(|s| found(entry, s)))
            .collect()
    }

    fn ask_tom(&self, terms: &[Name], seed: &SubstitutionSet) -> Vec<(Name, SubstitutionSet)> {
        // Perspectives nest one level deep.
        if !self.is_own() || terms.len() != 2 {
            return Vec::new();
        }
        let inner = &terms[1];
        match seed.apply(&terms[0]) {
            Name::Symbol(agent) => self.at(&agent).ask(inner, seed),
            Name::Variable(var) => self
                .kb
                .modeled_perspectives()
                .into_iter()
                .filter_map(|agent| {
                    let mut s = seed.clone();
                    s.bind(var.clone(), Name::Symbol(agent.clone())).then_some((agent, s))
                })
                .flat_map(|(agent, s)| self.at(&agent).ask(inner, &s))
                .collect(),
            Name::Composed { .. } => Vec::new(),
        }
    }

    fn resolve(&self, side: &Name, seed: &SubstitutionSet) -> Vec<(Operand, SubstitutionSet)> {
        let side = seed.apply(side).replace_self(&self.agent);
        match &side {
            Name::Variable(_) => vec![(Operand::Unbound(side), seed.clone())],
            Name::Symbol(sym) => {
                let stored = !sym.is_literal()
                    && (self.kb.registry.contains(sym)
                        || self.kb.perspectives.get(&self.agent).is_some_and(|m| m.contains_key(&side)));
                if stored {
                    self.ask(&side, seed).into_iter().map(|(v, s)| (Operand::Value(v), s)).collect()
                } else {
                    vec![(Operand::Value(side), seed.clone())]
                }
            }
            Name::Composed { .. } => {
                self.ask(&side, seed).into_iter().map(|(v, s)| (Operand::Value(v), s)).collect()
            }
        }
    }

    fn compare(op: Operator, lhs: Operand, rhs: Operand, s: SubstitutionSet) -> Option<SubstitutionSet> {
        match (lhs, rhs) {
            (Operand::Unbound(_), Operand::Unbound(_)) => None,
            (Operand::Unbound(var), Operand::Value(value)) | (Operand::Value(value), Operand::Unbound(var)) => {
                if op == Operator::Eq {
                    unify(&var, &value, &s)
                } else {
                    None
                }
            }
            (Operand::Value(a), Operand::Value(b)) => match op {
                Operator::Eq => unify(&a, &b, &s),
                Operator::Ne => unify(&a, &b, &s).is_none().then_some(s),
                ordering => {
                    let (x, y) = (a.as_number()?, b.as_number()?);
                    ordering.compare(x, y).then_some(s)
                }
            },
        }
    }

    pub fn evaluate_condition(&self, condition: &Condition, seed: &SubstitutionSet) -> Vec<SubstitutionSet> {
        let mut out = Vec::new();
        for (lhs, s1) in self.resolve(&condition.lhs, seed) {
            for (rhs, s2) in self.resolve(&condition.rhs, &s1) {
                if let Some(s) = Self::compare(condition.op, lhs.clone(), rhs, s2) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Conjunctive, left-to-right: every substitution set satisfying all
    /// conditions, carrying the product certainty of the beliefs used.
    pub fn evaluate_conditions(&self, conditions: &[Condition], seed: &SubstitutionSet) -> Vec<SubstitutionSet> {
        let mut sets = vec![seed.clone()];
        for condition in conditions {
            sets = sets.iter().flat_map(|s| self.evaluate_condition(condition, s)).collect();
            if sets.is_empty() {
                break;
            }
        }
        sets
    }
}
