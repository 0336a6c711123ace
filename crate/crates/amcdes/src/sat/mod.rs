//! Satisfiability via the tableau game.
//!
//! The input is brought into guarded form and its closure expanded into a
//! parity game: Eloise resolves disjunctions and picks rule conclusions,
//! Abelard picks one-step rule instances, and a determinized tracking
//! automaton flags plays containing a trace that unfolds a least fixpoint
//! infinitely often as dominant. Eloise wins iff the formula is satisfiable;
//! her strategy yields a model, which is model-checked before it is
//! returned.

pub mod automaton;
mod extract;
mod tableau;

use crate::cgses::Cgses;
use crate::error::SatError;
use crate::formula::{closure, Formula, Signature};
use crate::games::Owner;
use crate::mc;

pub use tableau::prune as prune_instances;

/// Resource limits. `AMCDES_BUDGET` overrides the defaults with a list such
/// as `closure=64,nodes=500000,automaton=100000`; a bare number sets
/// `nodes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub closure: usize,
    pub nodes: usize,
    pub automaton: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { closure: 64, nodes: 500_000, automaton: 100_000 }
    }
}

impl Budget {
    pub fn parse(text: &str) -> Result<Budget, String> {
        let mut b = Budget::default();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').unwrap_or(("nodes", part));
            let v: usize = value.trim().parse().map_err(|_| format!("bad budget value {value:?}"))?;
            match key.trim() {
                "closure" => b.closure = v.min(64),
                "nodes" => b.nodes = v,
                "automaton" => b.automaton = v,
                other => return Err(format!("unknown budget key {other:?}")),
            }
        }
        Ok(b)
    }

    /// Defaults, overridden by `AMCDES_BUDGET` when it is set and valid.
    pub fn from_env() -> Budget {
        std::env::var("AMCDES_BUDGET").ok().and_then(|s| Budget::parse(&s).ok()).unwrap_or_default()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub closure: usize,
    pub game_nodes: usize,
    pub automaton_states: usize,
    pub model_states: usize,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Sat { model: Cgses, initial: usize },
    Unsat,
    BudgetExceeded(String),
}

#[derive(Clone, Debug)]
pub struct SatReport {
    pub verdict: Verdict,
    pub stats: Stats,
}

pub fn satisfiable(phi: &Formula, sig: &Signature) -> Result<SatReport, SatError> {
    satisfiable_with(phi, sig, &Budget::from_env())
}

pub fn satisfiable_with(phi: &Formula, sig: &Signature, budget: &Budget) -> Result<SatReport, SatError> {
    let phi = &phi.uniquify_binders();
    phi.validate(sig)?;
    let guarded = phi.guarded();
    let cl = closure(&guarded);
    let mut stats = Stats { closure: cl.len(), ..Stats::default() };
    if cl.len() > budget.closure.min(64) {
        let msg = format!("closure has {} formulas, budget is {}", cl.len(), budget.closure.min(64));
        return Ok(SatReport { verdict: Verdict::BudgetExceeded(msg), stats });
    }
    let t = match tableau::Tableau::build(&cl, sig, budget) {
        Ok(t) => t,
        Err(msg) => return Ok(SatReport { verdict: Verdict::BudgetExceeded(msg), stats }),
    };
    stats.game_nodes = t.game.len();
    stats.automaton_states = t.automaton_states;
    let sol = t.game.solve();
    if sol.winner[0] == Owner::Abelard {
        return Ok(SatReport { verdict: Verdict::Unsat, stats });
    }
    let (model, initial) = extract::extract(&t, &sol, sig)?;
    let holds = mc::eval(phi, &model, &mc::Valuation::new()).map_err(|e| SatError::Internal(e.to_string()))?;
    if !holds.contains(&initial) {
        return Err(SatError::Internal("extracted model does not satisfy the formula".into()));
    }
    stats.model_states = model.n_states();
    Ok(SatReport { verdict: Verdict::Sat { model, initial }, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn verdict(text: &str, agents: usize) -> Verdict {
        let sig = Signature::anonymous(agents);
        let phi = parse(text, &sig).unwrap();
        satisfiable_with(&phi, &sig, &Budget::default()).unwrap().verdict
    }

    #[test]
    fn literal_clash_is_unsat() {
        assert!(matches!(verdict("p & !p", 2), Verdict::Unsat));
    }

    #[test]
    fn least_fixpoint_of_identity_is_unsat() {
        assert!(matches!(verdict("mu x. x", 2), Verdict::Unsat));
    }

    #[test]
    fn invariant_diamond_is_sat() {
        assert!(matches!(verdict("nu x. <{1}> x", 2), Verdict::Sat { .. }));
    }

    #[test]
    fn eventually_forever_is_unsat_when_contradicted() {
        assert!(matches!(verdict("(mu x. p | [{}] x) & (nu y. !p & [{}] y)", 2), Verdict::Unsat));
    }

    #[test]
    fn budget_strings() {
        assert_eq!(Budget::parse("closure=10,nodes=5").unwrap(), Budget { closure: 10, nodes: 5, automaton: 100_000 });
        assert_eq!(Budget::parse("42").unwrap().nodes, 42);
        assert!(Budget::parse("speed=1").is_err());
    }
}
