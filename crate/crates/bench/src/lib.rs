//! Workload generators for the benchmarks: random models and formulas, a
//! Büchi-style objective for model checking, and the request-granted family
//! for satisfiability.

use amcdes::{Cgses, Coalition, Formula, Modality, Signature};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn signature(agents: usize) -> Signature {
    Signature::anonymous(agents)
}

pub fn random_model(seed: u64, agents: usize, states: usize, max_k: usize) -> Cgses {
    Cgses::random(&mut rng(seed), &signature(agents), states, max_k, &["p", "q"])
}

fn random_coalition<R: Rng>(r: &mut R, agents: usize) -> Coalition {
    Coalition::from_agents((0..agents).filter(|_| r.gen_bool(0.5)))
}

/// Random closed formula of the given depth without explicit strategies.
pub fn random_formula(seed: u64, agents: usize, depth: usize) -> Formula {
    fn go<R: Rng>(r: &mut R, agents: usize, depth: usize, bound: &mut Vec<String>) -> Formula {
        if depth == 0 {
            return match (bound.choose(r), r.gen_range(0..3)) {
                (Some(x), 0) => Formula::var(x),
                (_, 1) => Formula::neg_atom(["p", "q"].choose(r).unwrap()),
                _ => Formula::atom(["p", "q"].choose(r).unwrap()),
            };
        }
        match r.gen_range(0..6) {
            0 => Formula::and(go(r, agents, depth - 1, bound), go(r, agents, depth - 1, bound)),
            1 => Formula::or(go(r, agents, depth - 1, bound), go(r, agents, depth - 1, bound)),
            2 => Formula::boxed(Modality::plain(random_coalition(r, agents)), go(r, agents, depth - 1, bound)),
            3 => Formula::diamond(Modality::plain(random_coalition(r, agents)), go(r, agents, depth - 1, bound)),
            k => {
                let x = format!("x{}", bound.len());
                bound.push(x.clone());
                let body = go(r, agents, depth - 1, bound);
                bound.pop();
                if k == 4 {
                    Formula::mu(&x, body)
                } else {
                    Formula::nu(&x, body)
                }
            }
        }
    }
    go(&mut rng(seed), agents, depth, &mut Vec::new()).uniquify_binders()
}

/// `nu x. mu y. (p & [{0}] x) | [{0}] y`: agent 0 can force `p` infinitely often.
pub fn buchi_formula() -> Formula {
    let m = || Modality::plain(Coalition::single(0));
    Formula::nu(
        "x",
        Formula::mu(
            "y",
            Formula::or(
                Formula::and(Formula::atom("p"), Formula::boxed(m(), Formula::var("x"))),
                Formula::boxed(m(), Formula::var("y")),
            ),
        ),
    )
}

/// Conjunction of `n` request-granted obligations for agents `0..n`, each
/// over its own proposition, against an idle extra agent.
pub fn request_granted(n: usize) -> (Formula, Signature) {
    let sig = signature(n + 1);
    let phi = (0..n)
        .map(|a| {
            let m = || Modality::plain(Coalition::single(a));
            let g = format!("g{a}");
            Formula::nu(
                "x",
                Formula::mu(
                    "y",
                    Formula::or(
                        Formula::and(Formula::atom(&g), Formula::boxed(m(), Formula::var("x"))),
                        Formula::boxed(m(), Formula::var("y")),
                    ),
                ),
            )
        })
        .reduce(Formula::and)
        .unwrap_or(Formula::Top)
        .uniquify_binders();
    (phi, sig)
}
