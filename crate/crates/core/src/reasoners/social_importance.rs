use serde::{Deserialize, Serialize};

use crate::kb::{Condition, KbView, KnownAgents, MetaBelief};
use crate::wfn::{unify, Name, SubstitutionSet, Symbol};

use super::target_candidates;

pub const SI_MIN: f64 = 1.0;
pub const SI_MAX: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionRule {
    pub target: Name,
    #[serde(default)]
    pub conditions: Vec<Condition>,
    #[serde(rename = "siValue")]
    pub si_value: f64,
}

/// Sums the value of every attribution rule that holds for a target, then
/// clamps to `[SI_MIN, SI_MAX]`.
#[derive(Debug, Clone, Default)]
pub struct SocialImportance {
    rules: Vec<AttributionRule>,
    known: KnownAgents,
}

impl SocialImportance {
    pub fn new(rules: Vec<AttributionRule>, known: KnownAgents) -> Self {
        SocialImportance { rules, known }
    }

    pub fn rules(&self) -> &[AttributionRule] {
        &self.rules
    }

    /// Social importance of `target` under the view's perspective.
    pub fn si(&self, target: &Symbol, view: &KbView<'_>) -> f64 {
        let target = Name::Symbol(target.clone());
        let total: f64 = self
            .rules
            .iter()
            .filter(|rule| {
                let pattern = rule.target.replace_self(view.agent());
                unify(&pattern, &target, &SubstitutionSet::new())
                    .is_some_and(|seed| !view.evaluate_conditions(&rule.conditions, &seed).is_empty())
            })
            .map(|rule| rule.si_value)
            .sum();
        total.clamp(SI_MIN, SI_MAX)
    }
}

impl MetaBelief for SocialImportance {
    fn evaluate(&self, args: &[Name], view: &KbView<'_>, seed: &SubstitutionSet) -> Vec<(Name, SubstitutionSet)> {
        let [arg] = args else {
            return Vec::new();
        };
        target_candidates(arg, view, &self.known)
            .into_iter()
            .filter_map(|t| unify(arg, &Name::Symbol(t.clone()), seed).map(|s| (Name::number(self.si(&t, view)), s)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::KnowledgeBase;
    use std::sync::Arc;

    fn n(s: &str) -> Name {
        Name::parse(s).unwrap()
    }

    fn sym(s: &str) -> Symbol {
        Symbol::new(s).unwrap()
    }

    fn rule(target: &str, conditions: &[&str], value: f64) -> AttributionRule {
        AttributionRule {
            target: n(target),
            conditions: conditions.iter().map(|c| Condition::parse(c).unwrap()).collect(),
            si_value: value,
        }
    }

    fn friend_rules() -> Vec<AttributionRule> {
        vec![rule("[t]", &["IsFriend(SELF, [t]) = True"], 30.0), rule("[t]", &[], 20.0)]
    }

    fn kb_with(rules: Vec<AttributionRule>, known: &KnownAgents) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new(sym("Sam"));
        kb.register_meta_belief(sym("SI"), Arc::new(SocialImportance::new(rules, known.clone()))).unwrap();
        kb
    }

    #[test]
    fn friend_outranks_stranger() {
        let known = KnownAgents::default();
        let mut kb = kb_with(friend_rules(), &known);
        kb.tell(&n("IsFriend(SELF, John)"), &n("True"), &Symbol::self_symbol(), 1.0).unwrap();
        let si = |who: &str| kb.value_of(&n(&format!("SI({who})"))).unwrap().as_number().unwrap();
        assert_eq!(si("John"), 50.0);
        assert_eq!(si("Mary"), 20.0);
    }

    #[test]
    fn clamped_to_range() {
        let known = KnownAgents::default();
        let kb = kb_with(vec![], &known);
        assert_eq!(kb.value_of(&n("SI(John)")).unwrap(), Name::number(1.0));
        let kb = kb_with(vec![rule("[t]", &[], 70.0), rule("John", &[], 70.0)], &known);
        assert_eq!(kb.value_of(&n("SI(John)")).unwrap(), Name::number(100.0));
        let kb = kb_with(vec![rule("[t]", &[], -50.0)], &known);
        assert_eq!(kb.value_of(&n("SI(John)")).unwrap(), Name::number(1.0));
    }

    #[test]
    fn rule_counts_once_however_many_bindings() {
        let known = KnownAgents::default();
        let mut kb = kb_with(vec![rule("[t]", &["Gift([t], [g]) = True"], 10.0)], &known);
        for g in ["Rose", "Book"] {
            kb.tell(&n(&format!("Gift(John, {g})")), &n("True"), &Symbol::self_symbol(), 1.0).unwrap();
        }
        assert_eq!(kb.value_of(&n("SI(John)")).unwrap(), Name::number(10.0));
    }

    #[test]
    fn variable_target_enumerates_known_agents() {
        let known = KnownAgents::default();
        known.insert(sym("John"));
        known.insert(sym("Mary"));
        known.insert(sym("Sam"));
        let mut kb = kb_with(friend_rules(), &known);
        kb.tell(&n("IsFriend(SELF, John)"), &n("True"), &Symbol::self_symbol(), 1.0).unwrap();
        let conds = [Condition::parse("SI([x]) > 30").unwrap()];
        let sets = kb.evaluate_conditions(&conds, &Symbol::self_symbol());
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].apply(&n("[x]")), n("John"));
    }

    #[test]
    fn tom_uses_the_other_perspective() {
        let known = KnownAgents::default();
        let mut kb = kb_with(friend_rules(), &known);
        // John considers Sam a friend, Sam does not reciprocate.
        kb.tell(&n("IsFriend(John, Sam)"), &n("True"), &sym("John"), 1.0).unwrap();
        assert_eq!(kb.value_of(&n("SI(John)")).unwrap(), Name::number(20.0));
        assert_eq!(kb.value_of(&n("ToM(John, SI(SELF))")).unwrap(), Name::number(50.0));
    }
}
