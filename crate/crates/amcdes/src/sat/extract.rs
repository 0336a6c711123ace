//! Reads a model off Eloise's winning strategy: one state per reachable
//! fully expanded position, with the one-step witness game of its modal
//! formulas over the positions Eloise steers to.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::tableau::{members, NodeKind, Tableau};
use crate::cgses::{Cgses, StateData};
use crate::error::SatError;
use crate::formula::{Formula, Signature};
use crate::games::Solution;
use crate::onestep::{extract_one_step_model, OneStepProblem, Tau};

/// Follows Eloise's strategy through propositional expansion.
fn settle(t: &Tableau, sol: &Solution, mut v: usize) -> Result<usize, SatError> {
    for _ in 0..=t.game.len() {
        match &t.kind[v] {
            NodeKind::Pos { modal: true, .. } => return Ok(v),
            NodeKind::Pos { .. } => {
                let succ = &t.game.nodes[v].succ;
                v = sol.strategy[v].or(succ.first().copied()).ok_or_else(|| {
                    SatError::Internal("strategy reaches a clashing sequent".into())
                })?;
            }
            NodeKind::Choice { .. } => return Err(SatError::Internal("unexpected choice node".into())),
        }
    }
    Err(SatError::Internal("propositional expansion does not terminate".into()))
}

pub(crate) fn extract(t: &Tableau, sol: &Solution, sig: &Signature) -> Result<(Cgses, usize), SatError> {
    let root = settle(t, sol, 0)?;
    let mut ids: HashMap<usize, usize> = HashMap::from([(root, 0)]);
    let mut order = vec![root];
    let mut queue = VecDeque::from([root]);
    let mut states: Vec<Option<StateData>> = vec![None];
    while let Some(v) = queue.pop_front() {
        let NodeKind::Pos { seq, .. } = t.kind[v] else { unreachable!() };
        let atoms: BTreeSet<String> = members(seq)
            .filter_map(|i| match &t.cl.formulas[i] {
                Formula::Atom(p) => Some(p.clone()),
                _ => None,
            })
            .collect();
        let modal = members(seq).filter(|&i| t.cl.is_modal(i)).fold(0u64, |s, i| s | (1 << i));
        let xi = t.steps.get(&modal).map(|s| s.xi.clone()).unwrap_or_default();
        // Successor positions, and for each the modal formulas whose
        // arguments hold there.
        let mut carrier: Vec<usize> = Vec::new();
        let mut holds: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &c in &t.game.nodes[v].succ {
            let NodeKind::Choice { targets } = &t.kind[c] else { unreachable!() };
            let w = sol.strategy[c]
                .or(t.game.nodes[c].succ.first().copied())
                .ok_or_else(|| SatError::Internal("rule instance without conclusions is won".into()))?;
            let u = settle(t, sol, w)?;
            let k = carrier.iter().position(|&x| x == u).unwrap_or_else(|| {
                carrier.push(u);
                carrier.len() - 1
            });
            for (target, theta) in targets {
                if *target == w {
                    for &j in theta {
                        holds.entry(j).or_default().insert(k);
                    }
                }
            }
        }
        if carrier.is_empty() {
            carrier.push(v);
        }
        let tau: Tau = (0..xi.len()).map(|j| (xi[j].var.clone(), holds.remove(&j).unwrap_or_default())).collect();
        let p = OneStepProblem::new(sig.clone(), xi, tau, carrier.len())
            .map_err(|e| SatError::Internal(e.to_string()))?;
        let g = extract_one_step_model(&p).map_err(|e| SatError::Internal(format!("one-step witness: {e}")))?;
        let outcome = g
            .f
            .iter()
            .map(|&x| {
                let u = carrier[x];
                *ids.entry(u).or_insert_with(|| {
                    order.push(u);
                    states.push(None);
                    queue.push_back(u);
                    order.len() - 1
                })
            })
            .collect();
        states[ids[&v]] = Some(StateData { atoms, k: g.k, outcome, interp: g.interp });
    }
    let model = Cgses {
        sig: sig.clone(),
        names: (0..order.len()).map(|i| format!("s{i}")).collect(),
        states: states.into_iter().map(|s| s.expect("every state is expanded")).collect(),
        has_interp: true,
    };
    model.validate().map_err(|e| SatError::Internal(e.to_string()))?;
    Ok((model, 0))
}
