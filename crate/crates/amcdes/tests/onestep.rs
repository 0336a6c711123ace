mod common;

use amcdes::onestep::{extract_one_step_model, lifting_holds, one_step_sat, one_step_sat_grand_free};

#[test]
fn rules_agree_with_brute_force_on_a_sample() {
    let family = common::exhaustive_family();
    let mut bad = Vec::new();
    for p in family.iter().step_by(97) {
        if one_step_sat(p) != common::brute_force_one_step(p) {
            bad.push(p.to_text());
        }
    }
    assert!(bad.is_empty(), "{} disagreements, first:\n{}", bad.len(), bad[0]);
}

#[test]
fn extraction_verifies() {
    for p in common::random_sat_problems(7, 100) {
        let g = extract_one_step_model(&p).unwrap_or_else(|e| panic!("{e}\n{}", p.to_text()));
        assert!(p.atoms.iter().all(|a| lifting_holds(a, &g, &p.tau)));
    }
}

#[test]
fn grand_free_fast_path_agrees() {
    let mut r = common::rng(3);
    for _ in 0..300 {
        let p = common::random_problem(&mut r, 3, 2, 2, 4);
        if let Some(v) = one_step_sat_grand_free(&p) {
            assert_eq!(v, one_step_sat(&p), "{}", p.to_text());
        }
    }
}

mod props {
    use super::common;
    use amcdes::onestep::{extract_one_step_model, lifting_holds, one_step_sat};
    use proptest::prelude::*;
    use rand::Rng;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn rules_are_sound_and_complete(seed in any::<u64>()) {
            let mut r = common::rng(seed);
            let agents = r.gen_range(1..=2);
            let carrier = r.gen_range(1..=2);
            let p = common::random_problem(&mut r, agents, 1, carrier, 3);
            prop_assert_eq!(one_step_sat(&p), common::brute_force_one_step(&p), "{}", p.to_text());
        }

        #[test]
        fn growing_tau_keeps_satisfiability(seed in any::<u64>()) {
            let mut r = common::rng(seed);
            let mut p = common::random_problem(&mut r, 3, 2, 3, 4);
            let before = one_step_sat(&p);
            for set in p.tau.values_mut() {
                set.extend((0..3).filter(|_| r.gen_bool(0.3)));
            }
            prop_assert!(!before || one_step_sat(&p));
        }

        #[test]
        fn witnesses_satisfy_every_atom(seed in any::<u64>()) {
            let p = common::random_sat_problems(seed, 1).remove(0);
            let g = extract_one_step_model(&p).unwrap();
            for a in &p.atoms {
                prop_assert!(lifting_holds(a, &g, &p.tau), "{}", p.to_text());
            }
        }

        #[test]
        fn text_format_round_trips(seed in any::<u64>()) {
            let mut r = common::rng(seed);
            let p = common::random_problem(&mut r, 3, 2, 3, 4);
            let q = amcdes::onestep::OneStepProblem::parse(&p.to_text()).unwrap();
            prop_assert_eq!(q.to_text(), p.to_text());
            prop_assert_eq!(one_step_sat(&q), one_step_sat(&p));
        }
    }
}
