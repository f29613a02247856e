//! Ranking checked against a brute-force enumeration of rule/target pairs.

use affect_engine::decision::{decide, DecisionRule, DELIBERATIVE};
use affect_engine::kb::{Condition, KnowledgeBase};
use affect_engine::{Name, Symbol};
use proptest::prelude::*;

fn n(s: &str) -> Name {
    Name::parse(s).unwrap()
}

const THINGS: [&str; 4] = ["Apple", "Bag", "Cup", "Door"];

fn rules(priorities: &[u8]) -> Vec<DecisionRule> {
    ["Take", "Use", "Drop"]
        .iter()
        .zip(priorities)
        .map(|(verb, p)| DecisionRule {
            action: n(&format!("{verb}([o])")),
            target: n("[o]"),
            conditions: vec![Condition::parse(&format!("{verb}able([o]) = True")).unwrap()],
            priority: n(&p.to_string()),
            layer: Symbol::new(DELIBERATIVE).unwrap(),
        })
        .collect()
}

proptest! {
    #[test]
    fn ranking_matches_brute_force(
        facts in prop::collection::vec((0..3usize, 0..4usize, 1..=10u8), 0..12),
        priorities in prop::array::uniform3(0..5u8),
        order in any::<u64>(),
    ) {
        let verbs = ["Take", "Use", "Drop"];
        let mut kb = KnowledgeBase::new(Symbol::new("Me").unwrap());
        let mut latest = std::collections::BTreeMap::new();
        for (v, t, c) in &facts {
            latest.insert((*v, *t), f64::from(*c) / 10.0);
        }
        // Insertion order must not affect the result.
        let mut entries: Vec<_> = latest.iter().collect();
        let len = entries.len().max(1);
        entries.rotate_left((order as usize) % len);
        for ((v, t), c) in entries {
            kb.tell(&n(&format!("{}able({})", verbs[*v], THINGS[*t])), &n("True"), &Symbol::self_symbol(), *c).unwrap();
        }
        let got: Vec<(String, f64)> = decide(&rules(&priorities), &kb.view(&Symbol::self_symbol()), &Symbol::new(DELIBERATIVE).unwrap())
            .candidates
            .iter()
            .map(|c| (c.action.to_string(), c.score))
            .collect();

        let mut expected: Vec<(f64, usize, String)> = latest
            .iter()
            .map(|((v, t), c)| (f64::from(priorities[*v]) * c, *v, format!("{}({})", verbs[*v], THINGS[*t])))
            .collect();
        expected.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let expected: Vec<(String, f64)> = expected.into_iter().map(|(s, _, a)| (a, s)).collect();
        prop_assert_eq!(got.len(), expected.len());
        for ((ga, gs), (ea, es)) in got.iter().zip(&expected) {
            prop_assert_eq!(ga, ea);
            prop_assert!((gs - es).abs() < 1e-12);
        }
    }
}
