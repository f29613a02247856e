//! Rule-based affective agent engine.
//!
//! Each module stands on its own: [`wfn`] terms and unification, the [`kb`]
//! belief store, [`emotional_state`], [`appraisal`], [`decision`], the social
//! [`reasoners`] and the explicit [`dialogue`] graph. [`character`] wires them
//! into a perceive/decide/tick agent and [`scenario`] loads whole scenarios
//! and runs the turn-based simulator.

pub mod appraisal;
pub mod character;
pub mod decision;
pub mod dialogue;
pub mod emotional_state;
pub mod kb;
pub mod reasoners;
pub mod scenario;
pub mod wfn;

pub use wfn::{Event, EventKind, Name, SubstitutionSet, Symbol, Variable};
