mod common;

use common::{fo_model, formula, model, naive_eval, rng};
use kvlog::bisim::{check_bisimulation, check_fo_bisimulation, greatest_bisim, BisimRelation, BisimError};
use kvlog::models::{derive_ternary, Model, TernaryModel};
use kvlog::syntax::{print, LanguageTag, Vocabulary};
use proptest::prelude::*;
use rand::Rng;

fn small_vocab() -> Vocabulary {
    Vocabulary::new(["a"], ["p"], ["c"]).unwrap()
}

fn pair(n1: usize, n2: usize, seed: u64) -> (TernaryModel, TernaryModel) {
    let v = small_vocab();
    (model(&v, n1, seed), model(&v, n2, seed.rotate_left(17) ^ 0x5a5a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn bisimilar_states_agree(n1 in 1usize..=5, n2 in 1usize..=5, seed in any::<u64>(), fseed in any::<u64>()) {
        let (m1, m2) = pair(n1, n2, seed);
        let z = greatest_bisim(&m1, &m2).relation;
        for k in 0..20 {
            let f = formula(&small_vocab(), LanguageTag::MLKvB, 2, fseed.wrapping_add(k));
            for &(s1, s2) in &z.pairs {
                prop_assert_eq!(naive_eval(&m1, s1, &f), naive_eval(&m2, s2, &f), "{}", print(&f));
            }
        }
    }

    #[test]
    fn unrelated_states_are_distinguished(n1 in 1usize..=4, n2 in 1usize..=4, seed in any::<u64>()) {
        let (m1, m2) = pair(n1, n2, seed);
        let r = greatest_bisim(&m1, &m2);
        prop_assert!(r.rounds <= n1 * n2);
        for s1 in 0..n1 {
            for s2 in 0..n2 {
                let d = r.distinguishing_formula(&m1, s1, &m2, s2);
                if r.relation.contains(s1, s2) {
                    prop_assert!(matches!(d, Err(BisimError::Bisimilar)));
                } else {
                    let f = d.unwrap();
                    prop_assert!(f.in_language(LanguageTag::MLKvB));
                    prop_assert!(naive_eval(&m1, s1, &f) && !naive_eval(&m2, s2, &f), "{}", print(&f));
                }
            }
        }
    }

    #[test]
    fn greatest_relation_is_a_bisimulation(n1 in 1usize..=5, n2 in 1usize..=5, seed in any::<u64>()) {
        let (m1, m2) = pair(n1, n2, seed);
        let z = greatest_bisim(&m1, &m2).relation;
        if !z.pairs.is_empty() {
            prop_assert_eq!(check_bisimulation(&m1, &m2, &z), vec![]);
        }
        prop_assert_eq!(greatest_bisim(&m2, &m1).relation, z.transpose());
        let own = greatest_bisim(&m1, &m1).relation;
        prop_assert!(BisimRelation::identity(n1).pairs.is_subset(&own.pairs));
    }

    #[test]
    fn first_order_clauses_match_derived_models(
        n1 in 1usize..=4,
        n2 in 1usize..=4,
        seed in any::<u64>(),
        density in 0.0f64..=1.0,
    ) {
        let v = small_vocab();
        let (f1, f2) = (fo_model(&v, n1, seed), fo_model(&v, n2, seed ^ 0xabc));
        let (t1, t2) = (derive_ternary(&f1), derive_ternary(&f2));
        let mut r = rng(seed);
        let random = BisimRelation::new(
            (0..n1).flat_map(|a| (0..n2).map(move |b| (a, b))).filter(|_| r.gen_bool(density)),
        );
        let greatest = greatest_bisim(&t1, &t2).relation;
        for z in [random, greatest] {
            prop_assert_eq!(
                check_fo_bisimulation(&f1, &f2, &z).is_empty(),
                check_bisimulation(&t1, &t2, &z).is_empty()
            );
        }
    }
}

#[test]
fn shipped_successor_models_are_told_apart() {
    let load = |name: &str| match Model::load(common::workspace().join("models").join(name)).unwrap().0 {
        Model::Ternary(m) => m,
        Model::Fo(f) => derive_ternary(&f),
    };
    let (left, right) = (load("three_successors.json"), load("two_successors.json"));
    let (s, x) = (left.state("s").unwrap(), right.state("x").unwrap());
    let r = greatest_bisim(&left, &right);
    assert!(!r.relation.contains(s, x));
    let f = r.distinguishing_formula(&left, s, &right, x).unwrap();
    assert!(naive_eval(&left, s, &f) && !naive_eval(&right, x, &f));
}
