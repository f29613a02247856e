//! Condition evaluation against a brute-force oracle. Conditions are built by
//! abstracting stored beliefs, so most queries have solutions.

use std::collections::{BTreeMap, BTreeSet};

use affect_engine::kb::{Condition, KnowledgeBase, Operator};
use affect_engine::{Name, SubstitutionSet, Symbol, Variable};
use proptest::prelude::*;

const CONSTS: [&str; 3] = ["A", "B", "C"];
const VALUES: [&str; 5] = ["A", "B", "1", "2", "3"];
const VARS: [&str; 3] = ["x", "y", "z"];

fn n(s: &str) -> Name {
    Name::parse(s).unwrap()
}

#[derive(Debug, Clone)]
struct Case {
    beliefs: Vec<(String, String, String)>,
    conditions: Vec<Condition>,
}

fn case() -> impl Strategy<Value = Case> {
    let belief = (0..2usize, 0..3usize, 0..3usize, 0..5usize)
        .prop_map(|(r, a, b, v)| (["P", "Q"][r].to_string(), format!("{}, {}", CONSTS[a], CONSTS[b]), VALUES[v].to_string()));
    let beliefs = prop::collection::vec(belief, 1..=20);
    let cond = (0..20usize, any::<[bool; 3]>(), 0..3usize, 0..3usize, 0..6usize, 0..5usize);
    (beliefs, prop::collection::vec(cond, 1..=4)).prop_map(|(beliefs, conds)| {
        let conditions = conds
            .into_iter()
            .map(|(pick, abstract_, va, vb, op, value)| {
                let (root, args, stored) = &beliefs[pick % beliefs.len()];
                let args: Vec<String> = args
                    .split(", ")
                    .enumerate()
                    .map(|(i, a)| if abstract_[i] { format!("[{}]", VARS[[va, vb][i]]) } else { a.to_string() })
                    .collect();
                let lhs = n(&format!("{root}({})", args.join(", ")));
                let (op, rhs) = match op {
                    0 => (Operator::Eq, n(stored)),
                    1 => (Operator::Eq, n(&format!("[{}]", VARS[2]))),
                    2 => (Operator::Ne, n(VALUES[value])),
                    3 => (Operator::Lt, n(VALUES[value])),
                    4 => (Operator::Ge, n(VALUES[value])),
                    _ => (Operator::Eq, n(VALUES[value])),
                };
                Condition::new(lhs, op, rhs)
            })
            .collect();
        Case { beliefs, conditions }
    })
}

fn holds(kb: &KnowledgeBase, c: &Condition, s: &SubstitutionSet) -> bool {
    let lhs = s.apply(&c.lhs);
    let rhs = s.apply(&c.rhs);
    let Some(value) = kb.beliefs().into_iter().find(|b| b.name == lhs).map(|b| b.value) else {
        return false;
    };
    match c.op {
        Operator::Eq => value == rhs,
        Operator::Ne => value != rhs,
        op => match (value.as_number(), rhs.as_number()) {
            (Some(a), Some(b)) => match op {
                Operator::Lt => a < b,
                Operator::Le => a <= b,
                Operator::Gt => a > b,
                _ => a >= b,
            },
            _ => false,
        },
    }
}

fn brute_force(kb: &KnowledgeBase, conditions: &[Condition]) -> BTreeSet<BTreeMap<String, String>> {
    let mut vars: Vec<Variable> = Vec::new();
    for c in conditions {
        for v in c.lhs.variables().into_iter().chain(c.rhs.variables()) {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    let domain: BTreeSet<&str> = CONSTS.iter().chain(VALUES.iter()).copied().collect();
    let domain: Vec<Name> = domain.into_iter().map(n).collect();
    let mut out = BTreeSet::new();
    for mut code in 0..domain.len().pow(vars.len() as u32) {
        let mut s = SubstitutionSet::new();
        for v in &vars {
            s.bind(v.clone(), domain[code % domain.len()].clone());
            code /= domain.len();
        }
        if conditions.iter().all(|c| holds(kb, c, &s)) {
            out.insert(s.to_text_map());
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn evaluation_matches_enumeration(case in case()) {
        let mut kb = KnowledgeBase::new(Symbol::new("Me").unwrap());
        for (root, args, value) in &case.beliefs {
            kb.tell(&n(&format!("{root}({args})")), &n(value), &Symbol::self_symbol(), 1.0).unwrap();
        }
        let engine = kb.evaluate_conditions(&case.conditions, &Symbol::self_symbol());
        let got: BTreeSet<_> = engine.iter().map(|s| s.to_text_map()).collect();
        prop_assert_eq!(got.len(), engine.len(), "duplicate solutions");
        prop_assert_eq!(got, brute_force(&kb, &case.conditions));
    }

    #[test]
    fn certainty_is_the_product_of_sources(c1 in 0.0f64..=1.0, c2 in 0.0f64..=1.0) {
        let mut kb = KnowledgeBase::new(Symbol::new("Me").unwrap());
        kb.tell(&n("P(A)"), &n("1"), &Symbol::self_symbol(), c1).unwrap();
        kb.tell(&n("Q(A)"), &n("2"), &Symbol::self_symbol(), c2).unwrap();
        let conds = [Condition::parse("P([x]) = 1").unwrap(), Condition::parse("Q([x]) = 2").unwrap()];
        let out = kb.evaluate_conditions(&conds, &Symbol::self_symbol());
        prop_assert_eq!(out.len(), 1);
        prop_assert!((out[0].certainty() - c1 * c2).abs() < 1e-12);
    }
}
