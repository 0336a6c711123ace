mod common;

use amcdes::sat::automaton::{determinize, ExplicitNpa};
use rand::Rng;

fn random_npa<R: Rng>(r: &mut R, n: usize, sigma: usize, max_prio: u32) -> ExplicitNpa {
    ExplicitNpa {
        initial: (0..n).filter(|&q| q == 0 || r.gen_bool(0.2)).collect(),
        priority: (0..n).map(|_| r.gen_range(0..=max_prio)).collect(),
        delta: (0..n)
            .map(|_| (0..sigma).map(|_| (0..n).filter(|_| r.gen_bool(0.45)).collect()).collect())
            .collect(),
    }
}

/// All lassos `stem · cycle^ω` with `|stem| + |cycle| ≤ max`.
fn lassos(sigma: usize, max: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for total in 1..=max {
        for word in common::product(&vec![sigma; total]) {
            for split in 0..total {
                out.push((word[..split].to_vec(), word[split..].to_vec()));
            }
        }
    }
    out
}

#[test]
fn determinization_preserves_lasso_languages() {
    let mut r = common::rng(21);
    let words = lassos(2, 6);
    for round in 0..300 {
        let a = random_npa(&mut r, 3, 2, 3);
        let d = determinize(&a, 100_000).unwrap();
        for (stem, cycle) in &words {
            assert_eq!(a.accepts_lasso(stem, cycle), d.accepts_lasso(stem, cycle), "round {round}: {a:?} on {stem:?} ({cycle:?})^ω");
        }
    }
}

#[test]
fn empty_language_stays_empty() {
    let a = ExplicitNpa { initial: vec![0], priority: vec![1, 3], delta: vec![vec![vec![0, 1], vec![1]], vec![vec![0], vec![1]]] };
    let d = determinize(&a, 1000).unwrap();
    assert!(lassos(2, 6).iter().all(|(s, c)| !d.accepts_lasso(s, c)));
}
