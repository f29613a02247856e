//! Meta-belief providers for social reasoning.
//!
//! [`SocialImportance`] backs `SI([target])` and [`SocialExchanges`] backs
//! `SE([name], [target], [step], [mode])`. Both implement
//! [`MetaBelief`](crate::kb::MetaBelief) and are registered by the character.

pub mod social_exchange;
pub mod social_importance;

pub use social_exchange::{ExchangeInstance, ExchangeTracker, ModeCondition, SocialExchange, SocialExchanges};
pub use social_importance::{AttributionRule, SocialImportance, SI_MAX, SI_MIN};

use crate::kb::{KbView, KnownAgents};
use crate::wfn::{Name, Symbol};

/// Candidate agents for a target argument: the bound symbol, or every known
/// agent other than the viewer when the argument is a variable.
pub(crate) fn target_candidates(arg: &Name, view: &KbView<'_>, known: &KnownAgents) -> Vec<Symbol> {
    match arg {
        Name::Symbol(s) => vec![s.clone()],
        Name::Variable(_) => known.snapshot().into_iter().filter(|a| a != view.agent()).collect(),
        Name::Composed { .. } => Vec::new(),
    }
}
