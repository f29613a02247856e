use affect_engine::wfn::unify;
use affect_engine::{Name, SubstitutionSet, Symbol};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Name> {
    prop_oneof![
        prop::sample::select(vec!["A", "Bob", "Apple", "True", "SELF", "3", "-2.5"]).prop_map(|s| Name::parse(s).unwrap()),
        prop::sample::select(vec!["x", "y", "object"]).prop_map(|v| Name::variable(v).unwrap()),
    ]
}

fn name() -> impl Strategy<Value = Name> {
    leaf().prop_recursive(3, 16, 3, |inner| {
        (prop::sample::select(vec!["Has", "ToM", "Speak", "Likes"]), prop::collection::vec(inner, 1..4))
            .prop_map(|(root, terms)| Name::composed(Symbol::new(root).unwrap(), terms))
    })
}

fn ground() -> impl Strategy<Value = Name> {
    name().prop_map(|n| {
        let mut s = SubstitutionSet::new();
        for v in n.variables() {
            s.bind(v, Name::parse("Apple").unwrap());
        }
        s.apply(&n)
    })
}

proptest! {
    #[test]
    fn display_parse_round_trip(n in name()) {
        let text = n.to_string();
        prop_assert_eq!(Name::parse(&text).unwrap(), n.clone());
        prop_assert_eq!(Name::parse(&text).unwrap().to_string(), text);
    }

    #[test]
    fn unifier_makes_terms_equal(a in name(), b in name()) {
        if let Some(s) = unify(&a, &b, &SubstitutionSet::new()) {
            prop_assert_eq!(s.apply(&a), s.apply(&b));
        }
    }

    #[test]
    fn unification_is_symmetric_in_success(a in name(), b in name()) {
        let ab = unify(&a, &b, &SubstitutionSet::new());
        let ba = unify(&b, &a, &SubstitutionSet::new());
        prop_assert_eq!(ab.is_some(), ba.is_some());
        if let Some(y) = ba {
            prop_assert_eq!(y.apply(&a), y.apply(&b));
        }
    }

    #[test]
    fn ground_terms_unify_only_with_themselves(a in ground(), b in ground()) {
        prop_assert_eq!(unify(&a, &b, &SubstitutionSet::new()).is_some(), a == b);
    }

    #[test]
    fn term_unifies_with_itself(a in name()) {
        prop_assert!(unify(&a, &a, &SubstitutionSet::new()).is_some());
    }
}

#[test]
fn symbols_compare_case_insensitively_and_numbers_by_value() {
    assert_eq!(Name::parse("apple").unwrap(), Name::parse("Apple").unwrap());
    assert_eq!(Name::parse("2").unwrap(), Name::parse("2.0").unwrap());
}
