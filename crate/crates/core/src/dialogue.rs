//! Explicit dialogue structure: a central table of state transitions with
//! meaning and style tags, read by agents through `ValidDialogue`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{KbView, MetaBelief};
use crate::wfn::{unify, Name, ParseError, SubstitutionSet, Symbol};

/// Tag used for entries without meanings or styles.
pub const NEUTRAL_TAG: &str = "-";
pub const END_STATE: &str = "End";
pub const START_PREFIX: &str = "Start";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueEntry {
    pub id: Symbol,
    #[serde(rename = "currentState")]
    pub current_state: Symbol,
    #[serde(rename = "nextState")]
    pub next_state: Symbol,
    pub utterance: String,
    #[serde(default)]
    pub meanings: Vec<Symbol>,
    #[serde(default)]
    pub styles: Vec<Symbol>,
}

fn neutral() -> Symbol {
    Symbol::new(NEUTRAL_TAG).expect("neutral tag")
}

impl DialogueEntry {
    pub fn meaning_tags(&self) -> Vec<Symbol> {
        if self.meanings.is_empty() { vec![neutral()] } else { self.meanings.clone() }
    }

    pub fn style_tags(&self) -> Vec<Symbol> {
        if self.styles.is_empty() { vec![neutral()] } else { self.styles.clone() }
    }

    /// `Speak(cs, ns, m, s)` for each tag combination of this entry.
    pub fn speak_actions(&self) -> Vec<Name> {
        let mut out = Vec::new();
        for m in self.meaning_tags() {
            for s in self.style_tags() {
                out.push(speak_action(&self.current_state, &self.next_state, &m, &s));
            }
        }
        out
    }
}

pub fn speak_action(cs: &Symbol, ns: &Symbol, meaning: &Symbol, style: &Symbol) -> Name {
    Name::composed(
        Symbol::new("Speak").expect("literal"),
        vec![cs.clone().into(), ns.clone().into(), meaning.clone().into(), style.clone().into()],
    )
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DialogueGraph {
    entries: Vec<DialogueEntry>,
    outgoing: BTreeMap<Symbol, Vec<usize>>,
}

impl DialogueGraph {
    pub fn new(entries: Vec<DialogueEntry>) -> Self {
        let mut outgoing: BTreeMap<Symbol, Vec<usize>> = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            outgoing.entry(e.current_state.clone()).or_default().push(i);
        }
        DialogueGraph { entries, outgoing }
    }

    pub fn entries(&self) -> &[DialogueEntry] {
        &self.entries
    }

    pub fn get(&self, id: &Symbol) -> Option<&DialogueEntry> {
        self.entries.iter().find(|e| &e.id == id)
    }

    /// Entries leaving `state`, in authoring order.
    pub fn from_state(&self, state: &Symbol) -> Vec<&DialogueEntry> {
        self.outgoing.get(state).map(|ix| ix.iter().map(|&i| &self.entries[i]).collect()).unwrap_or_default()
    }

    /// Every state mentioned by an entry, in first-appearance order.
    pub fn states(&self) -> Vec<Symbol> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for e in &self.entries {
            for s in [&e.current_state, &e.next_state] {
                if seen.insert(s.clone()) {
                    out.push(s.clone());
                }
            }
        }
        out
    }

    /// Entry that realises a ground `Speak(cs, ns, m, s)` action.
    pub fn entry_for_action(&self, action: &Name) -> Option<&DialogueEntry> {
        self.entries.iter().find(|e| e.speak_actions().contains(action))
    }

    /// One substitution per entry and tag combination matching the patterns.
    pub fn valid_dialogue(&self, cs: &Name, ns: &Name, m: &Name, s: &Name, seed: &SubstitutionSet) -> Vec<SubstitutionSet> {
        let mut out = Vec::new();
        for entry in &self.entries {
            let Some(base) = unify(cs, &entry.current_state.clone().into(), seed)
                .and_then(|b| unify(ns, &entry.next_state.clone().into(), &b))
            else {
                continue;
            };
            for meaning in entry.meaning_tags() {
                let Some(with_m) = unify(m, &meaning.into(), &base) else {
                    continue;
                };
                for style in entry.style_tags() {
                    if let Some(full) = unify(s, &style.into(), &with_m) {
                        out.push(full);
                    }
                }
            }
        }
        out
    }

    /// Default start states: configured ones plus every `Start*` state, or
    /// the states without incoming transitions when neither exists.
    pub fn start_states(&self, configured: &[Symbol]) -> Vec<Symbol> {
        let states = self.states();
        let mut starts: Vec<Symbol> = configured.to_vec();
        for s in &states {
            let prefixed = s.as_str().len() >= START_PREFIX.len()
                && s.as_str()[..START_PREFIX.len()].eq_ignore_ascii_case(START_PREFIX);
            if prefixed && !starts.contains(s) {
                starts.push(s.clone());
            }
        }
        if starts.is_empty() {
            let targets: BTreeSet<&Symbol> = self.entries.iter().map(|e| &e.next_state).collect();
            starts = states.into_iter().filter(|s| !targets.contains(s)).collect();
        }
        starts
    }

    /// Depth-first reachability and structural checks.
    pub fn validate(&self, configured_starts: &[Symbol]) -> ValidationReport {
        let starts = self.start_states(configured_starts);
        let mut visited = BTreeSet::new();
        let mut stack: Vec<Symbol> = starts.iter().rev().cloned().collect();
        while let Some(state) = stack.pop() {
            if !visited.insert(state.clone()) {
                continue;
            }
            for e in self.from_state(&state).into_iter().rev() {
                if !visited.contains(&e.next_state) {
                    stack.push(e.next_state.clone());
                }
            }
        }
        let states = self.states();
        let end = Symbol::new(END_STATE).expect("literal");
        let end_states: Vec<Symbol> = states.iter().filter(|s| !self.outgoing.contains_key(*s)).cloned().collect();
        let mut ids = BTreeSet::new();
        let mut duplicate_ids = BTreeSet::new();
        for e in &self.entries {
            if !ids.insert(e.id.clone()) {
                duplicate_ids.insert(e.id.clone());
            }
        }
        ValidationReport {
            unreachable: states.iter().filter(|s| !visited.contains(*s)).cloned().collect(),
            dangling: end_states.iter().filter(|s| **s != end).cloned().collect(),
            end_states,
            duplicate_ids: duplicate_ids.into_iter().collect(),
            leaving_end: self.entries.iter().filter(|e| e.current_state == end).map(|e| e.id.clone()).collect(),
            start_states: starts,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(CSV_HEADER).expect("in-memory write");
        for e in &self.entries {
            let join = |tags: &[Symbol]| tags.iter().map(Symbol::as_str).collect::<Vec<_>>().join(";");
            writer
                .write_record([
                    e.id.as_str(),
                    e.current_state.as_str(),
                    e.next_state.as_str(),
                    e.utterance.as_str(),
                    &join(&e.meanings),
                    &join(&e.styles),
                ])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    pub fn from_csv(text: &str) -> Result<DialogueGraph, CsvError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| CsvError::Csv { row: 1, message: e.to_string() })?.clone();
        let header: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
        let expected: Vec<String> = CSV_HEADER.iter().map(|h| h.to_ascii_lowercase()).collect();
        if header != expected {
            return Err(CsvError::Header(header.join(",")));
        }
        let mut entries: Vec<DialogueEntry> = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row = i + 2;
            let record = record.map_err(|e| CsvError::Csv { row, message: e.to_string() })?;
            let field = |idx: usize, name: &'static str| -> Result<Symbol, CsvError> {
                let text = record.get(idx).unwrap_or_default();
                if text.is_empty() {
                    return Err(CsvError::Missing { row, field: name });
                }
                Symbol::new(text).map_err(|source| CsvError::Symbol { row, field: name, source })
            };
            let tags = |idx: usize, name: &'static str| -> Result<Vec<Symbol>, CsvError> {
                record
                    .get(idx)
                    .unwrap_or_default()
                    .split(';')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| Symbol::new(t).map_err(|source| CsvError::Symbol { row, field: name, source }))
                    .collect()
            };
            let entry = DialogueEntry {
                id: field(0, "id")?,
                current_state: field(1, "currentState")?,
                next_state: field(2, "nextState")?,
                utterance: record.get(3).unwrap_or_default().to_string(),
                meanings: tags(4, "meanings")?,
                styles: tags(5, "styles")?,
            };
            if entry.current_state.as_str().eq_ignore_ascii_case(END_STATE) {
                return Err(CsvError::LeavesEnd { row });
            }
            if entries.iter().any(|e| e.id == entry.id) {
                return Err(CsvError::DuplicateId { row, id: entry.id.to_string() });
            }
            entries.push(entry);
        }
        Ok(DialogueGraph::new(entries))
    }

    pub fn to_dot(&self) -> String {
        let quote = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
        let mut out = String::from("digraph dialogue {\n");
        for s in self.states() {
            let _ = writeln!(out, "  {};", quote(s.as_str()));
        }
        for e in &self.entries {
            let label = format!("{}: {}", e.id, e.utterance);
            let _ = writeln!(
                out,
                "  {} -> {} [label={}];",
                quote(e.current_state.as_str()),
                quote(e.next_state.as_str()),
                quote(&label)
            );
        }
        out.push_str("}\n");
        out
    }
}

pub const CSV_HEADER: [&str; 6] = ["id", "currentState", "nextState", "utterance", "meanings", "styles"];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("unexpected CSV header '{0}'")]
    Header(String),
    #[error("row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("row {row}: missing {field}")]
    Missing { row: usize, field: &'static str },
    #[error("row {row}: invalid {field}: {source}")]
    Symbol { row: usize, field: &'static str, source: ParseError },
    #[error("row {row}: duplicate id '{id}'")]
    DuplicateId { row: usize, id: String },
    #[error("row {row}: entries cannot leave the End state")]
    LeavesEnd { row: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    #[serde(rename = "startStates")]
    pub start_states: Vec<Symbol>,
    pub unreachable: Vec<Symbol>,
    #[serde(rename = "endStates")]
    pub end_states: Vec<Symbol>,
    /// End states other than `End`.
    pub dangling: Vec<Symbol>,
    #[serde(rename = "duplicateIds")]
    pub duplicate_ids: Vec<Symbol>,
    /// Entries whose current state is `End`.
    #[serde(rename = "leavingEnd")]
    pub leaving_end: Vec<Symbol>,
}

impl ValidationReport {
    pub fn has_errors(&self) -> bool {
        !self.duplicate_ids.is_empty() || !self.leaving_end.is_empty()
    }

    pub fn has_warnings(&self) -> bool {
        !self.unreachable.is_empty() || !self.dangling.is_empty()
    }
}

impl MetaBelief for DialogueGraph {
    fn evaluate(&self, args: &[Name], _view: &KbView<'_>, seed: &SubstitutionSet) -> Vec<(Name, SubstitutionSet)> {
        let [cs, ns, m, s] = args else {
            return Vec::new();
        };
        self.valid_dialogue(cs, ns, m, s, seed).into_iter().map(|b| (Name::truth(true), b)).collect()
    }
}
