mod common;

use amcdes::{Owner, ParityGame};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #[test]
    fn zielonka_matches_strategy_enumeration(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let n = r.gen_range(1..=6);
        let g = common::random_game(&mut r, n, 4);
        let sol = g.solve();
        prop_assert_eq!(&sol.winner, &common::parity_oracle(&g), "{}", g.to_pgsolver());
        prop_assert!(g.verify(&sol).is_ok());
    }

    #[test]
    fn pgsolver_round_trip(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let n = r.gen_range(1..=8);
        let g = common::random_game(&mut r, n, 5);
        let back = ParityGame::from_pgsolver(&g.to_pgsolver()).unwrap();
        prop_assert_eq!(back.to_pgsolver(), g.to_pgsolver());
        prop_assert_eq!(back.solve().winner, g.solve().winner);
    }

    #[test]
    fn shifting_priorities_by_two_changes_nothing(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let n = r.gen_range(1..=8);
        let g = common::random_game(&mut r, n, 5);
        let mut h = g.clone();
        for v in &mut h.nodes {
            v.priority += 2;
        }
        prop_assert_eq!(h.solve().winner, g.solve().winner);
    }
}

#[test]
fn dead_ends_lose_for_their_owner() {
    let mut g = ParityGame::new();
    let e = g.add_node(Owner::Eloise, 0);
    let a = g.add_node(Owner::Abelard, 1);
    let sol = g.solve();
    assert_eq!(sol.winner[e], Owner::Abelard);
    assert_eq!(sol.winner[a], Owner::Eloise);
}

#[test]
fn larger_random_games_verify() {
    let mut r = common::rng(77);
    for _ in 0..200 {
        let g = common::random_game(&mut r, 40, 7);
        g.verify(&g.solve()).unwrap();
    }
}
