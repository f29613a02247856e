//! Scenario files, world effects and the simulator.

pub mod file;
pub mod simulation;
pub mod world;

pub use file::{CharacterSpec, ScenarioError, ScenarioFile, FORMAT_VERSION};
pub use simulation::{ChoiceError, LogEntry, Simulation, StepOutcome, DEFAULT_MAX_STEPS};
pub use world::{AppliedEffect, Effect, EffectRule};
