//! Layered, priority-ordered action selection.
//!
//! A rule yields one candidate per substitution set satisfying its
//! conditions. The score is the resolved priority times the certainty of the
//! beliefs consumed. Candidates are ordered by descending score, then rule
//! declaration order, then the canonical text of action and target.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::kb::{Condition, KbView};
use crate::wfn::{Name, SubstitutionSet, Symbol};

pub const REACTIVE: &str = "Reactive";
pub const DELIBERATIVE: &str = "Deliberative";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRule {
    pub action: Name,
    pub target: Name,
    #[serde(default)]
    pub conditions: Vec<Condition>,
    pub priority: Name,
    #[serde(default = "default_layer")]
    pub layer: Symbol,
}

fn default_layer() -> Symbol {
    Symbol::new(DELIBERATIVE).expect("literal")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionCandidate {
    pub action: Name,
    pub target: Symbol,
    pub score: f64,
    pub rule: usize,
    pub bindings: SubstitutionSet,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Decision {
    pub candidates: Vec<ActionCandidate>,
    pub warnings: Vec<String>,
}

fn rank(a: &ActionCandidate, b: &ActionCandidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.rule.cmp(&b.rule))
        .then_with(|| a.action.to_string().cmp(&b.action.to_string()))
        .then_with(|| a.target.as_str().cmp(b.target.as_str()))
}

/// Evaluate the rules of `layer` against `view` and rank the candidates.
pub fn decide(rules: &[DecisionRule], view: &KbView<'_>, layer: &Symbol) -> Decision {
    let agent = view.agent().clone();
    let mut decision = Decision::default();
    for (index, rule) in rules.iter().enumerate().filter(|(_, r)| &r.layer == layer) {
        for bindings in view.evaluate_conditions(&rule.conditions, &SubstitutionSet::new()) {
            let action = bindings.apply(&rule.action.replace_self(&agent));
            let target = bindings.apply(&rule.target.replace_self(&agent));
            let priority = bindings.apply(&rule.priority.replace_self(&agent));
            let warn = |what: String| format!("decision rule #{index} ({}): {what}", rule.action);
            let Some(priority) = priority.as_number() else {
                decision.warnings.push(warn(format!("priority '{priority}' is not a number")));
                continue;
            };
            if priority < 0.0 {
                decision.warnings.push(warn(format!("negative priority {priority}")));
                continue;
            }
            if !action.is_ground() {
                decision.warnings.push(warn(format!("action '{action}' is not ground")));
                continue;
            }
            let Some(target) = target.as_symbol().filter(|_| target.is_ground()).cloned() else {
                decision.warnings.push(warn(format!("target '{target}' is not a ground symbol")));
                continue;
            };
            decision.candidates.push(ActionCandidate {
                action,
                target,
                score: priority * bindings.certainty(),
                rule: index,
                bindings,
            });
        }
    }
    decision.candidates.sort_by(rank);
    decision
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::KnowledgeBase;

    fn n(s: &str) -> Name {
        Name::parse(s).unwrap()
    }

    fn sym(s: &str) -> Symbol {
        Symbol::new(s).unwrap()
    }

    fn rule(action: &str, target: &str, conditions: &[&str], priority: &str, layer: &str) -> DecisionRule {
        DecisionRule {
            action: n(action),
            target: n(target),
            conditions: conditions.iter().map(|c| Condition::parse(c).unwrap()).collect(),
            priority: n(priority),
            layer: sym(layer),
        }
    }

    fn eat_kb() -> KnowledgeBase {
        let mut kb = KnowledgeBase::new(sym("John"));
        for (p, v) in [("Has(Bag)", "True"), ("Has(Apple)", "True"), ("Edible(Apple)", "True")] {
            kb.tell(&n(p), &n(v), &Symbol::self_symbol(), 1.0).unwrap();
        }
        kb
    }

    #[test]
    fn eat_example_yields_one_candidate() {
        let rules = [rule("Eat([object])", "[object]", &["Has([object]) = True", "Edible([object]) = True"], "1", "Deliberative")];
        let kb = eat_kb();
        let out = decide(&rules, &kb.view(&sym("John")), &sym(DELIBERATIVE));
        assert_eq!(out.candidates.len(), 1);
        assert_eq!(out.candidates[0].action, n("Eat(Apple)"));
        assert_eq!(out.candidates[0].target, sym("Apple"));
        assert_eq!(out.candidates[0].score, 1.0);
    }

    #[test]
    fn layer_isolation_and_empty_layer() {
        let rules = [rule("Eat([object])", "[object]", &["Has([object]) = True"], "1", "Deliberative")];
        let kb = eat_kb();
        assert!(decide(&rules, &kb.view(&sym("John")), &sym(REACTIVE)).candidates.is_empty());
        assert!(decide(&[], &kb.view(&sym("John")), &sym(DELIBERATIVE)).candidates.is_empty());
    }

    #[test]
    fn certainty_discounts_priority() {
        let mut kb = KnowledgeBase::new(sym("John"));
        kb.tell(&n("Hungry(SELF)"), &n("True"), &Symbol::self_symbol(), 0.4).unwrap();
        kb.tell(&n("Tired(SELF)"), &n("True"), &Symbol::self_symbol(), 1.0).unwrap();
        let rules = [
            rule("Eat", "SELF", &["Hungry(SELF) = True"], "2", "Deliberative"),
            rule("Sleep", "SELF", &["Tired(SELF) = True"], "1", "Deliberative"),
        ];
        let out = decide(&rules, &kb.view(&sym("John")), &sym(DELIBERATIVE));
        let scores: Vec<_> = out.candidates.iter().map(|c| (c.action.to_string(), c.score)).collect();
        assert_eq!(scores, vec![("Sleep".to_string(), 1.0), ("Eat".to_string(), 0.8)]);
    }

    #[test]
    fn ties_break_by_rule_then_text() {
        let mut kb = KnowledgeBase::new(sym("John"));
        for x in ["B", "A"] {
            kb.tell(&n(&format!("Near({x})")), &n("True"), &Symbol::self_symbol(), 1.0).unwrap();
        }
        let rules = [
            rule("Greet([x])", "[x]", &["Near([x]) = True"], "1", "Deliberative"),
            rule("Wave([x])", "[x]", &["Near([x]) = True"], "1", "Deliberative"),
        ];
        let out = decide(&rules, &kb.view(&sym("John")), &sym(DELIBERATIVE));
        let actions: Vec<_> = out.candidates.iter().map(|c| c.action.to_string()).collect();
        assert_eq!(actions, ["Greet(A)", "Greet(B)", "Wave(A)", "Wave(B)"]);
    }

    #[test]
    fn bad_priorities_and_targets_are_dropped() {
        let kb = eat_kb();
        let rules = [
            rule("Eat(Apple)", "Apple", &[], "[p]", "Deliberative"),
            rule("Eat(Apple)", "Apple", &[], "-1", "Deliberative"),
            rule("Eat(Apple)", "[t]", &[], "1", "Deliberative"),
            rule("Eat([y])", "Apple", &[], "1", "Deliberative"),
        ];
        let out = decide(&rules, &kb.view(&sym("John")), &sym(DELIBERATIVE));
        assert!(out.candidates.is_empty());
        assert_eq!(out.warnings.len(), 4);
    }

    #[test]
    fn priority_can_come_from_bindings() {
        let mut kb = KnowledgeBase::new(sym("John"));
        kb.tell(&n("Urge(Eat)"), &n("3"), &Symbol::self_symbol(), 1.0).unwrap();
        kb.tell(&n("Urge(Sleep)"), &n("5"), &Symbol::self_symbol(), 0.5).unwrap();
        let rules = [rule("[a]", "SELF", &["Urge([a]) = [p]"], "[p]", "Deliberative")];
        let out = decide(&rules, &kb.view(&sym("John")), &sym(DELIBERATIVE));
        assert_eq!(out.candidates[0].action, n("Eat"));
        assert_eq!(out.candidates[0].target, sym("John"));
        assert_eq!(out.candidates[1].score, 2.5);
    }
}
