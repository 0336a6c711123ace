mod common;

use std::collections::BTreeSet;

use amcdes::mc::{self, Valuation};
use amcdes::{Cgses, Formula, Signature, StateData};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> (ChaCha8Rng, Signature, Formula, Cgses) {
    let mut r = common::rng(seed);
    let sig = common::signature(r.gen_range(2..=3), 1);
    let phi = common::random_formula(&mut r, &sig, 4, &["p", "q"]);
    let n = r.gen_range(1..=5);
    let s = Cgses::random(&mut r, &sig, n, 2, &["p", "q"]);
    (r, sig, phi, s)
}

fn ev(phi: &Formula, s: &Cgses) -> BTreeSet<usize> {
    mc::eval(phi, s, &Valuation::new()).unwrap()
}

proptest! {
    #[test]
    fn negation_complements(seed in any::<u64>()) {
        let (_, _, phi, s) = instance(seed);
        let (a, b) = (ev(&phi, &s), ev(&phi.negate(), &s));
        prop_assert!(a.is_disjoint(&b));
        prop_assert_eq!(a.len() + b.len(), s.n_states());
    }

    #[test]
    fn box_and_diamond_are_dual(seed in any::<u64>()) {
        let (mut r, sig, phi, s) = instance(seed);
        let m = common::random_modality(&mut r, &sig);
        let b = ev(&Formula::boxed(m.clone(), phi.clone()), &s);
        let d = ev(&Formula::diamond(m, phi.negate()), &s);
        prop_assert!(b.is_disjoint(&d));
        prop_assert_eq!(b.len() + d.len(), s.n_states());
    }

    #[test]
    fn unfolding_preserves_fixpoints(seed in any::<u64>()) {
        let (_, _, phi, s) = instance(seed);
        let mut fixpoints = Vec::new();
        phi.visit(&mut |f| if f.is_fixpoint() && f.is_closed() { fixpoints.push(f.clone()) });
        for f in fixpoints {
            prop_assert_eq!(ev(&f, &s), ev(&f.unfold().unwrap(), &s));
        }
    }

    #[test]
    fn bodies_are_monotone_in_their_variable(seed in any::<u64>()) {
        let (mut r, _, phi, s) = instance(seed);
        let mut bodies = Vec::new();
        phi.visit(&mut |f| match f {
            Formula::Mu(x, b) | Formula::Nu(x, b) if f.is_closed() => bodies.push((x.clone(), (**b).clone())),
            _ => {}
        });
        for (x, body) in bodies {
            let small: BTreeSet<usize> = (0..s.n_states()).filter(|_| r.gen_bool(0.4)).collect();
            let big: BTreeSet<usize> = (0..s.n_states()).filter(|w| small.contains(w) || r.gen_bool(0.4)).collect();
            let lo = mc::eval(&body, &s, &Valuation::from([(x.clone(), small)])).unwrap();
            let hi = mc::eval(&body, &s, &Valuation::from([(x, big)])).unwrap();
            prop_assert!(lo.is_subset(&hi));
        }
    }

    #[test]
    fn lifting_is_monotone(seed in any::<u64>()) {
        let (mut r, sig, _, s) = instance(seed);
        let m = common::random_modality(&mut r, &sig);
        let small: BTreeSet<usize> = (0..s.n_states()).filter(|_| r.gen_bool(0.4)).collect();
        let big: BTreeSet<usize> = (0..s.n_states()).filter(|w| small.contains(w) || r.gen_bool(0.4)).collect();
        prop_assert!(mc::pre(&s, &m, &small).is_subset(&mc::pre(&s, &m, &big)));
        prop_assert_eq!(mc::pre(&s, &m, &small), common::brute_pre(&s, &m, &small));
    }

    #[test]
    fn engines_agree(seed in any::<u64>()) {
        let (_, _, phi, s) = instance(seed);
        let a = ev(&phi, &s);
        prop_assert_eq!(&a, &mc::game_check(&phi, &s).unwrap());
        prop_assert_eq!(&a, &mc::eval_one_step(&phi, &s, &Valuation::new()).unwrap());
    }

    #[test]
    fn invariance_encoding_matches_iteration(seed in any::<u64>()) {
        let (mut r, sig, phi, s) = instance(seed);
        let m = common::random_modality(&mut r, &sig);
        let g = Formula::nu("G", Formula::and(phi.clone(), Formula::boxed(m.clone(), Formula::var("G"))));
        let base = ev(&phi, &s);
        let mut y: BTreeSet<usize> = (0..s.n_states()).collect();
        loop {
            let next: BTreeSet<usize> = base.intersection(&common::brute_pre(&s, &m, &y)).copied().collect();
            if next == y {
                break;
            }
            y = next;
        }
        prop_assert_eq!(ev(&g, &s), y);
    }

    #[test]
    fn open_check_finds_an_interpretation_iff_one_exists(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let sig = common::signature(2, r.gen_range(1..=2));
        let phi = common::random_formula(&mut r, &sig, 3, &["p"]);
        let n = r.gen_range(1..=2);
        let s = Cgses::random(&mut r, &sig, n, 2, &["p"]);
        let found = mc::open_check(&phi, &s, 0).unwrap();
        let exists = common::all_interpretations(&s).iter().any(|m| ev(&phi, m).contains(&0));
        prop_assert_eq!(found.is_some(), exists);
        if let Some(m) = found {
            prop_assert!(ev(&phi, &m).contains(&0));
        }
    }
}

#[test]
fn printer_example_depends_on_the_interpretation() {
    let sig = Signature::new(
        vec!["Alice".into(), "Bob".into(), "Printer".into()],
        vec![vec![], vec!["cancelPrint".into(), "splitPrint".into()], vec![]],
    );
    let phi = amcdes::parse("[Alice, (Bob:{cancelPrint|splitPrint})] printed", &sig).unwrap();
    // Alice's move 1 prints unless Bob plays his third move.
    let start = StateData {
        atoms: BTreeSet::new(),
        k: vec![2, 3, 1],
        outcome: vec![0, 0, 0, 1, 1, 0],
        interp: vec![vec![], vec![0, 1], vec![]],
    };
    let done = StateData {
        atoms: BTreeSet::from(["printed".to_string()]),
        k: vec![1, 1, 1],
        outcome: vec![1],
        interp: vec![vec![], vec![0, 0], vec![]],
    };
    let mut s = Cgses { sig, names: vec!["w0".into(), "w1".into()], states: vec![start, done], has_interp: true };
    s.validate().unwrap();
    assert!(ev(&phi, &s).contains(&0));
    s.states[0].interp[1] = vec![0, 2];
    assert!(!ev(&phi, &s).contains(&0));
    assert!(mc::open_check(&phi, &s, 0).unwrap().is_some());
}
