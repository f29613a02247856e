//! Well-formed names: the term language shared by events, beliefs and rules.
//!
//! A [`Name`] is a symbol (`John`, `5`, `True`), a variable (`[x]`) or a
//! composed name (`Has(John, [x])`). Symbols compare case-insensitively and
//! numeric symbols compare by value, so `5` and `5.0` are the same symbol.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Reserved symbol replaced by the name of the agent doing the reasoning.
pub const SELF: &str = "SELF";
/// Reserved symbol that unifies with anything without binding.
pub const WILDCARD: &str = "*";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("unexpected character '{found}' at position {position}")]
    UnexpectedChar { found: char, position: usize },
    #[error("unexpected end of input at position {position}, expected {expected}")]
    UnexpectedEnd { position: usize, expected: &'static str },
    #[error("empty term at position {position}")]
    EmptyTerm { position: usize },
    #[error("invalid symbol '{text}' at position {position}")]
    InvalidSymbol { text: String, position: usize },
    #[error("unbalanced '{open}' opened at position {position}")]
    Unbalanced { open: char, position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Empty => 0,
            ParseError::UnexpectedChar { position, .. }
            | ParseError::UnexpectedEnd { position, .. }
            | ParseError::EmptyTerm { position }
            | ParseError::InvalidSymbol { position, .. }
            | ParseError::Unbalanced { position, .. } => *position,
        }
    }
}

#[derive(Debug, Clone)]
enum SymbolKey {
    Number(f64),
    Text(String),
}

/// A constant: identifier, number, boolean literal, `SELF` or `*`.
#[derive(Debug, Clone)]
pub struct Symbol {
    text: String,
    key: SymbolKey,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn looks_numeric(text: &str) -> bool {
    let rest = text.strip_prefix(['-', '+']).unwrap_or(text);
    let rest = rest.strip_prefix('.').unwrap_or(rest);
    rest.starts_with(|c: char| c.is_ascii_digit())
}

fn format_number(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{}", value as i64)
    } else {
        format!("{value}")
    }
}

impl Symbol {
    pub fn new(text: &str) -> Result<Symbol, ParseError> {
        let invalid = || ParseError::InvalidSymbol { text: text.to_string(), position: 0 };
        if text.is_empty() {
            return Err(ParseError::Empty);
        }
        if text == WILDCARD {
            return Ok(Symbol { text: text.to_string(), key: SymbolKey::Text(text.to_string()) });
        }
        if looks_numeric(text) {
            let value: f64 = text.parse().map_err(|_| invalid())?;
            if !value.is_finite() {
                return Err(invalid());
            }
            let value = if value == 0.0 { 0.0 } else { value };
            return Ok(Symbol { text: text.to_string(), key: SymbolKey::Number(value) });
        }
        if !text.chars().all(is_ident_char) {
            return Err(invalid());
        }
        Ok(Symbol { text: text.to_string(), key: SymbolKey::Text(text.to_ascii_lowercase()) })
    }

    /// Numeric symbol printed in its shortest canonical form.
    pub fn number(value: f64) -> Symbol {
        let value = if value == 0.0 { 0.0 } else { value };
        Symbol { text: format_number(value), key: SymbolKey::Number(value) }
    }

    pub fn truth(value: bool) -> Symbol {
        Symbol::new(if value { "True" } else { "False" }).expect("literal")
    }

    pub fn self_symbol() -> Symbol {
        Symbol::new(SELF).expect("literal")
    }

    pub fn wildcard() -> Symbol {
        Symbol::new(WILDCARD).expect("literal")
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn as_number(&self) -> Option<f64> {
        match self.key {
            SymbolKey::Number(v) => Some(v),
            SymbolKey::Text(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match &self.key {
            SymbolKey::Text(t) if t == "true" => Some(true),
            SymbolKey::Text(t) if t == "false" => Some(false),
            _ => None,
        }
    }

    pub fn is_self(&self) -> bool {
        matches!(&self.key, SymbolKey::Text(t) if t == "self")
    }

    pub fn is_wildcard(&self) -> bool {
        self.text == WILDCARD
    }

    /// Numbers, booleans and the wildcard never name a stored property.
    pub fn is_literal(&self) -> bool {
        self.as_number().is_some() || self.as_bool().is_some() || self.is_wildcard()
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Symbol {}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.key, &other.key) {
            (SymbolKey::Number(a), SymbolKey::Number(b)) => a.total_cmp(b),
            (SymbolKey::Number(_), SymbolKey::Text(_)) => Ordering::Less,
            (SymbolKey::Text(_), SymbolKey::Number(_)) => Ordering::Greater,
            (SymbolKey::Text(a), SymbolKey::Text(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.key {
            SymbolKey::Number(v) => {
                0u8.hash(state);
                v.to_bits().hash(state);
            }
            SymbolKey::Text(t) => {
                1u8.hash(state);
                t.hash(state);
            }
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for Symbol {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Symbol::new(s.trim())
    }
}

/// A logical variable, printed as `[name]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: &str) -> Result<Variable, ParseError> {
        if name.is_empty() {
            return Err(ParseError::Empty);
        }
        if !name.chars().all(is_ident_char) {
            return Err(ParseError::InvalidSymbol { text: name.to_string(), position: 0 });
        }
        Ok(Variable(name.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Name {
    Symbol(Symbol),
    Variable(Variable),
    Composed { root: Symbol, terms: Vec<Name> },
}

impl Name {
    pub fn parse(input: &str) -> Result<Name, ParseError> {
        Parser::new(input).parse_all()
    }

    pub fn symbol(text: &str) -> Result<Name, ParseError> {
        Symbol::new(text).map(Name::Symbol)
    }

    pub fn variable(name: &str) -> Result<Name, ParseError> {
        Variable::new(name).map(Name::Variable)
    }

    pub fn number(value: f64) -> Name {
        Name::Symbol(Symbol::number(value))
    }

    pub fn truth(value: bool) -> Name {
        Name::Symbol(Symbol::truth(value))
    }

    pub fn composed(root: Symbol, terms: Vec<Name>) -> Name {
        assert!(!terms.is_empty(), "composed names need at least one term");
        Name::Composed { root, terms }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self {
            Name::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_variable(&self) -> Option<&Variable> {
        match self {
            Name::Variable(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        self.as_symbol().and_then(Symbol::as_number)
    }

    /// Root symbol of a composed name, or the symbol itself.
    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Name::Symbol(s) => Some(s),
            Name::Composed { root, .. } => Some(root),
            Name::Variable(_) => None,
        }
    }

    pub fn terms(&self) -> &[Name] {
        match self {
            Name::Composed { terms, .. } => terms,
            _ => &[],
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Name::Symbol(_) => true,
            Name::Variable(_) => false,
            Name::Composed { terms, .. } => terms.iter().all(Name::is_ground),
        }
    }

    pub fn contains_wildcard(&self) -> bool {
        match self {
            Name::Symbol(s) => s.is_wildcard(),
            Name::Variable(_) => false,
            Name::Composed { root, terms } => {
                root.is_wildcard() || terms.iter().any(Name::contains_wildcard)
            }
        }
    }

    /// Variables in order of first appearance.
    pub fn variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    pub(crate) fn collect_variables(&self, out: &mut Vec<Variable>) {
        match self {
            Name::Symbol(_) => {}
            Name::Variable(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Name::Composed { terms, .. } => terms.iter().for_each(|t| t.collect_variables(out)),
        }
    }

    /// Replace every `SELF` symbol (including a root) with `agent`.
    pub fn replace_self(&self, agent: &Symbol) -> Name {
        match self {
            Name::Symbol(s) if s.is_self() => Name::Symbol(agent.clone()),
            Name::Symbol(_) | Name::Variable(_) => self.clone(),
            Name::Composed { root, terms } => Name::Composed {
                root: if root.is_self() { agent.clone() } else { root.clone() },
                terms: terms.iter().map(|t| t.replace_self(agent)).collect(),
            },
        }
    }

    pub fn apply(&self, subst: &SubstitutionSet) -> Name {
        subst.apply(self)
    }

    fn occurs(&self, var: &Variable, subst: &SubstitutionSet) -> bool {
        match subst.walk(self) {
            Name::Variable(v) => v == var,
            Name::Symbol(_) => false,
            Name::Composed { terms, .. } => terms.iter().any(|t| t.occurs(var, subst)),
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::Symbol(s) => write!(f, "{s}"),
            Name::Variable(v) => write!(f, "{v}"),
            Name::Composed { root, terms } => {
                write!(f, "{root}(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for Name {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Name::parse(s)
    }
}

impl From<Symbol> for Name {
    fn from(s: Symbol) -> Self {
        Name::Symbol(s)
    }
}

impl From<Variable> for Name {
    fn from(v: Variable) -> Self {
        Name::Variable(v)
    }
}

impl Serialize for Name {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Accepts JSON strings, numbers and booleans as term text.
struct TermText;

impl serde::de::Visitor<'_> for TermText {
    type Value = String;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a term as text, number or boolean")
    }

    fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<String, E> {
        Ok(v.to_string())
    }

    fn visit_bool<E: serde::de::Error>(self, v: bool) -> Result<String, E> {
        Ok(Symbol::truth(v).text)
    }

    fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<String, E> {
        Ok(v.to_string())
    }

    fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<String, E> {
        Ok(v.to_string())
    }

    fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<String, E> {
        Ok(Symbol::number(v).text)
    }
}

impl<'de> Deserialize<'de> for Name {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = deserializer.deserialize_any(TermText)?;
        Name::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = deserializer.deserialize_any(TermText)?;
        Symbol::new(text.trim()).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser { input, pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.input[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn parse_all(mut self) -> Result<Name, ParseError> {
        self.skip_ws();
        if self.peek().is_none() {
            return Err(ParseError::Empty);
        }
        let name = self.parse_name()?;
        self.skip_ws();
        match self.peek() {
            None => Ok(name),
            Some(c) => Err(ParseError::UnexpectedChar { found: c, position: self.pos }),
        }
    }

    fn token(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if is_ident_char(c) || matches!(c, '.' | '+' | '*') {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        &self.input[start..self.pos]
    }

    fn parse_name(&mut self) -> Result<Name, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(ParseError::UnexpectedEnd { position: self.pos, expected: "a name" }),
            Some('[') => {
                self.pos += 1;
                let text = self.token();
                if text.is_empty() {
                    return match self.peek() {
                        Some(']') => Err(ParseError::EmptyTerm { position: self.pos }),
                        Some(c) => Err(ParseError::UnexpectedChar { found: c, position: self.pos }),
                        None => Err(ParseError::Unbalanced { open: '[', position: start }),
                    };
                }
                let var = Variable::new(text).map_err(|_| ParseError::InvalidSymbol {
                    text: text.to_string(),
                    position: start + 1,
                })?;
                match self.peek() {
                    Some(']') => {
                        self.pos += 1;
                        Ok(Name::Variable(var))
                    }
                    Some(c) => Err(ParseError::UnexpectedChar { found: c, position: self.pos }),
                    None => Err(ParseError::Unbalanced { open: '[', position: start }),
                }
            }
            Some(c) if c == ',' || c == ')' => Err(ParseError::EmptyTerm { position: self.pos }),
            Some(_) => {
                let text = self.token();
                if text.is_empty() {
                    let found = self.peek().expect("non-empty");
                    return Err(ParseError::UnexpectedChar { found, position: self.pos });
                }
                let root = Symbol::new(text).map_err(|_| ParseError::InvalidSymbol {
                    text: text.to_string(),
                    position: start,
                })?;
                self.skip_ws();
                if self.peek() != Some('(') {
                    return Ok(Name::Symbol(root));
                }
                let open = self.pos;
                self.pos += 1;
                let mut terms = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(ParseError::Unbalanced { open: '(', position: open }),
                        Some(')') | Some(',') => {
                            return Err(ParseError::EmptyTerm { position: self.pos })
                        }
                        _ => {}
                    }
                    terms.push(self.parse_name()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(c) => {
                            return Err(ParseError::UnexpectedChar { found: c, position: self.pos })
                        }
                        None => return Err(ParseError::Unbalanced { open: '(', position: open }),
                    }
                }
                Ok(Name::Composed { root, terms })
            }
        }
    }
}

/// Variable bindings plus the product certainty of the beliefs consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionSet {
    bindings: BTreeMap<Variable, Name>,
    certainty: f64,
}

impl Default for SubstitutionSet {
    fn default() -> Self {
        SubstitutionSet { bindings: BTreeMap::new(), certainty: 1.0 }
    }
}

impl SubstitutionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn certainty(&self) -> f64 {
        self.certainty
    }

    pub fn with_certainty(mut self, certainty: f64) -> Self {
        self.certainty = certainty;
        self
    }

    pub fn scale_certainty(&mut self, factor: f64) {
        self.certainty *= factor;
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Name)> {
        self.bindings.iter()
    }

    /// Raw binding, without following chains.
    pub fn binding(&self, var: &Variable) -> Option<&Name> {
        self.bindings.get(var)
    }

    /// Fully resolved value of a variable, if bound.
    pub fn get(&self, var: &Variable) -> Option<Name> {
        self.bindings.get(var).map(|n| self.apply(n))
    }

    /// Bind a variable; fails on a conflicting binding or a cycle.
    pub fn bind(&mut self, var: Variable, value: Name) -> bool {
        unify_into(&Name::Variable(var), &value, self)
    }

    fn walk<'a>(&'a self, mut name: &'a Name) -> &'a Name {
        while let Name::Variable(v) = name {
            match self.bindings.get(v) {
                Some(next) => name = next,
                None => break,
            }
        }
        name
    }

    pub fn apply(&self, name: &Name) -> Name {
        match self.walk(name) {
            Name::Composed { root, terms } => Name::Composed {
                root: root.clone(),
                terms: terms.iter().map(|t| self.apply(t)).collect(),
            },
            other => other.clone(),
        }
    }

    /// Bindings restricted to `vars`, fully resolved.
    pub fn restrict(&self, vars: &[Variable]) -> BTreeMap<Variable, Name> {
        vars.iter().filter_map(|v| self.get(v).map(|n| (v.clone(), n))).collect()
    }

    /// Every bound variable with its resolved value, as canonical text.
    pub fn to_text_map(&self) -> BTreeMap<String, String> {
        self.bindings
            .keys()
            .map(|v| (v.to_string(), self.apply(&Name::Variable(v.clone())).to_string()))
            .collect()
    }
}

/// Unify `a` and `b` on top of `seed`; `None` when no bindings make them equal.
pub fn unify(a: &Name, b: &Name, seed: &SubstitutionSet) -> Option<SubstitutionSet> {
    let mut subst = seed.clone();
    unify_into(a, b, &mut subst).then_some(subst)
}

pub fn apply_substitution(name: &Name, subst: &SubstitutionSet) -> Name {
    subst.apply(name)
}

fn unify_into(a: &Name, b: &Name, subst: &mut SubstitutionSet) -> bool {
    let a = subst.walk(a).clone();
    let b = subst.walk(b).clone();
    match (&a, &b) {
        (Name::Symbol(s), _) | (_, Name::Symbol(s)) if s.is_wildcard() => true,
        (Name::Variable(x), Name::Variable(y)) if x == y => true,
        (Name::Variable(x), t) | (t, Name::Variable(x)) => {
            if t.occurs(x, subst) {
                return false;
            }
            subst.bindings.insert(x.clone(), t.clone());
            true
        }
        (Name::Symbol(p), Name::Symbol(q)) => p == q,
        (Name::Composed { root: r1, terms: t1 }, Name::Composed { root: r2, terms: t2 }) => {
            r1 == r2
                && t1.len() == t2.len()
                && t1.iter().zip(t2).all(|(x, y)| unify_into(x, y, subst))
        }
        _ => false,
    }
}

/// Which of the two event shapes an [`Event`] has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    ActionEnd,
    PropertyChange,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("event '{0}' is not ground")]
    NotGround(String),
    #[error("'{0}' is not of the form Event(Action-End|Property-Change, subject, x, y)")]
    Malformed(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A perceived event: `Event(Action-End, subject, action, target)` or
/// `Event(Property-Change, subject, property, value)`, plus a tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    name: Name,
    kind: EventKind,
    pub timestamp: u64,
}

impl Event {
    pub fn from_name(name: Name, timestamp: u64) -> Result<Event, EventError> {
        let kind = match &name {
            Name::Composed { root, terms } if root.as_str().eq_ignore_ascii_case("Event") && terms.len() == 4 => {
                match terms[0].as_symbol().map(|s| s.as_str().to_ascii_lowercase()) {
                    Some(k) if k == "action-end" => EventKind::ActionEnd,
                    Some(k) if k == "property-change" => EventKind::PropertyChange,
                    _ => return Err(EventError::Malformed(name.to_string())),
                }
            }
            _ => return Err(EventError::Malformed(name.to_string())),
        };
        if !name.is_ground() {
            return Err(EventError::NotGround(name.to_string()));
        }
        if terms_subject(&name).as_symbol().is_none() {
            return Err(EventError::Malformed(name.to_string()));
        }
        Ok(Event { name, kind, timestamp })
    }

    pub fn parse(text: &str, timestamp: u64) -> Result<Event, EventError> {
        Event::from_name(Name::parse(text)?, timestamp)
    }

    pub fn action_end(subject: Symbol, action: Name, target: Name, timestamp: u64) -> Result<Event, EventError> {
        Event::from_name(
            Name::Composed {
                root: Symbol::new("Event").expect("literal"),
                terms: vec![Name::symbol("Action-End").expect("literal"), subject.into(), action, target],
            },
            timestamp,
        )
    }

    pub fn property_change(subject: Symbol, property: Name, value: Name, timestamp: u64) -> Result<Event, EventError> {
        Event::from_name(
            Name::Composed {
                root: Symbol::new("Event").expect("literal"),
                terms: vec![Name::symbol("Property-Change").expect("literal"), subject.into(), property, value],
            },
            timestamp,
        )
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn kind(&self) -> EventKind {
        self.kind
    }

    pub fn subject(&self) -> &Symbol {
        terms_subject(&self.name).as_symbol().expect("validated")
    }

    /// The action (Action-End) or property (Property-Change).
    pub fn action(&self) -> &Name {
        &self.name.terms()[2]
    }

    /// The target (Action-End) or new value (Property-Change).
    pub fn target(&self) -> &Name {
        &self.name.terms()[3]
    }
}

fn terms_subject(name: &Name) -> &Name {
    &name.terms()[1]
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::parse(s).unwrap()
    }

    fn sym(s: &str) -> Name {
        Name::symbol(s).unwrap()
    }

    fn var(s: &str) -> Variable {
        Variable::new(s).unwrap()
    }

    #[test]
    fn parses_composed_with_variable() {
        let name = n("Has(John, [x])");
        assert_eq!(
            name,
            Name::Composed {
                root: Symbol::new("Has").unwrap(),
                terms: vec![sym("John"), Name::variable("x").unwrap()],
            }
        );
        assert_eq!(name.to_string(), "Has(John, [x])");
    }

    #[test]
    fn parses_self_as_reserved_symbol() {
        let name = n("SELF");
        assert!(name.as_symbol().unwrap().is_self());
    }

    #[test]
    fn parses_nested_event() {
        let name = n("Event(Action-End, Sam, Turn(On), TV)");
        let terms = name.terms();
        assert_eq!(terms.len(), 4);
        assert_eq!(terms[2], n("Turn(On)"));
        assert!(matches!(terms[2], Name::Composed { .. }));
    }

    #[test]
    fn numbers_are_numeric_symbols() {
        assert_eq!(n("5").as_number(), Some(5.0));
        assert_eq!(n("-4").as_number(), Some(-4.0));
        assert_eq!(n("0.5").as_number(), Some(0.5));
        assert_eq!(n("5"), n("5.0"));
        assert_eq!(Symbol::number(1.5).to_string(), "1.5");
        assert_eq!(Symbol::number(-3.0).to_string(), "-3");
    }

    #[test]
    fn symbols_compare_case_insensitively() {
        assert_eq!(n("True"), n("true"));
        assert_eq!(n("Has(Apple)"), n("has(apple)"));
        assert_ne!(n("On"), n("Off"));
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(n(" F( a ,b , G( c ) ) ").to_string(), "F(a, b, G(c))");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(Name::parse(""), Err(ParseError::Empty));
        assert_eq!(Name::parse("F(a"), Err(ParseError::Unbalanced { open: '(', position: 1 }));
        assert_eq!(Name::parse("F(a,)"), Err(ParseError::EmptyTerm { position: 4 }));
        assert_eq!(Name::parse("F()"), Err(ParseError::EmptyTerm { position: 2 }));
        assert_eq!(Name::parse("[x"), Err(ParseError::Unbalanced { open: '[', position: 0 }));
        assert_eq!(Name::parse("[]"), Err(ParseError::EmptyTerm { position: 1 }));
        assert_eq!(Name::parse("a b"), Err(ParseError::UnexpectedChar { found: 'b', position: 2 }));
        assert_eq!(Name::parse("F(a))").unwrap_err().position(), 4);
        assert!(matches!(Name::parse("Fo$o"), Err(ParseError::UnexpectedChar { found: '$', .. })));
        assert!(matches!(Name::parse("a*b"), Err(ParseError::InvalidSymbol { .. })));
    }

    #[test]
    fn unify_binds_variable() {
        let s = unify(&n("Has([object])"), &n("Has(Apple)"), &SubstitutionSet::new()).unwrap();
        assert_eq!(s.get(&var("object")), Some(sym("Apple")));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn unify_identical_ground_terms() {
        let s = unify(&n("John"), &n("John"), &SubstitutionSet::new()).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn unify_repeated_variable_conflict() {
        assert!(unify(&n("F([x],[x])"), &n("F(A,B)"), &SubstitutionSet::new()).is_none());
        assert!(unify(&n("F([x],[x])"), &n("F(A,A)"), &SubstitutionSet::new()).is_some());
    }

    #[test]
    fn wildcard_matches_without_binding() {
        let s = unify(&n("Event(Action-End,[x],Smile,*)"), &n("Event(Action-End,Sam,Smile,John)"), &SubstitutionSet::new())
            .unwrap();
        assert_eq!(s.len(), 1);
        assert!(unify(&n("*"), &n("F(G(a))"), &SubstitutionSet::new()).unwrap().is_empty());
    }

    #[test]
    fn occurs_check_rejects_cycles() {
        assert!(unify(&n("[x]"), &n("F([x])"), &SubstitutionSet::new()).is_none());
        assert!(unify(&n("G([x], [y])"), &n("G([y], F([x]))"), &SubstitutionSet::new()).is_none());
    }

    #[test]
    fn variable_chains_resolve() {
        let s = unify(&n("F([x], [y])"), &n("F([y], A)"), &SubstitutionSet::new()).unwrap();
        assert_eq!(s.get(&var("x")), Some(sym("A")));
        assert_eq!(s.apply(&n("G([x])")), n("G(A)"));
    }

    #[test]
    fn unify_respects_seed() {
        let mut seed = SubstitutionSet::new();
        assert!(seed.bind(var("x"), sym("B")));
        assert!(unify(&n("F([x])"), &n("F(A)"), &seed).is_none());
        assert!(!seed.bind(var("x"), sym("C")));
    }

    #[test]
    fn apply_substitution_examples() {
        let mut s = SubstitutionSet::new();
        s.bind(var("object"), sym("Apple"));
        assert_eq!(apply_substitution(&n("Eat([object])"), &s), n("Eat(Apple)"));

        let mut s = SubstitutionSet::new();
        s.bind(var("x"), sym("A"));
        assert_eq!(apply_substitution(&n("John"), &s), n("John"));

        let mut s = SubstitutionSet::new();
        s.bind(var("x"), sym("A"));
        s.bind(var("y"), sym("B"));
        assert_eq!(apply_substitution(&n("F([x],G([y]))"), &s), n("F(A,G(B))"));
    }

    #[test]
    fn replace_self_everywhere() {
        let agent = Symbol::new("Sam").unwrap();
        assert_eq!(n("RapportLevel(SELF, [x])").replace_self(&agent), n("RapportLevel(Sam, [x])"));
    }

    #[test]
    fn events_validate_shape() {
        let e = Event::parse("Event(Property-Change, Sam, State(TV), On)", 3).unwrap();
        assert_eq!(e.kind(), EventKind::PropertyChange);
        assert_eq!(e.subject().as_str(), "Sam");
        assert_eq!(e.action(), &n("State(TV)"));
        assert_eq!(e.target(), &n("On"));
        assert!(matches!(Event::parse("Event(Action-End, [x], Smile, John)", 0), Err(EventError::NotGround(_))));
        assert!(matches!(Event::parse("Event(Happened, Sam, Smile, John)", 0), Err(EventError::Malformed(_))));
        assert!(matches!(Event::parse("Smile(John)", 0), Err(EventError::Malformed(_))));
    }

    #[test]
    fn serde_uses_canonical_text() {
        let name = n("Has(John,[x])");
        let json = serde_json::to_string(&name).unwrap();
        assert_eq!(json, "\"Has(John, [x])\"");
        let back: Name = serde_json::from_str(&json).unwrap();
        assert_eq!(back, name);
    }
}
