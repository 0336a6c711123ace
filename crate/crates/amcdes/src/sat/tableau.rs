//! The tableau game. Positions pair a sequent (a set of closure formulas,
//! as a bitmask) with a state of the determinized tracking automaton.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use super::automaton::{Automaton, Determinizer};
use super::Budget;
use crate::formula::{Closure, Formula, Signature};
use crate::games::{Owner, ParityGame};
use crate::onestep::{match_rules, ModalAtom, Polarity};

/// Trace relation of one rule application: pairs of closure indices.
pub(crate) type Letter = Vec<(usize, usize)>;

/// Follows single formulas through rule applications. Accepting runs are
/// traces on which the dominating fixpoint is a least one.
pub(crate) struct Tracker<'a> {
    cl: &'a Closure,
}

impl Automaton for Tracker<'_> {
    type Letter = Letter;

    fn n_states(&self) -> usize {
        self.cl.len()
    }

    fn initial(&self) -> Vec<usize> {
        vec![0]
    }

    fn priority(&self, q: usize) -> u32 {
        if self.cl.is_fixpoint(q) {
            self.cl.priority[q] + 1
        } else {
            1
        }
    }

    fn successors(&self, q: usize, a: &Letter) -> Vec<usize> {
        a.iter().filter(|(from, _)| *from == q).map(|(_, to)| *to).collect()
    }
}

/// The modal step at a fully expanded sequent: its modal formulas as atoms
/// and the rule instances left for Abelard after dominance pruning, each a
/// list of conclusions (sets of positions in `formulas`).
pub(crate) struct ModalStep {
    pub formulas: Vec<usize>,
    pub xi: Vec<ModalAtom>,
    pub instances: Vec<Vec<BTreeSet<usize>>>,
}

#[derive(Clone, Debug)]
pub(crate) enum NodeKind {
    /// `modal` marks fully expanded sequents without a clash.
    Pos { seq: u64, modal: bool },
    /// Eloise picks a conclusion of one rule instance; `targets` pairs each
    /// conclusion with the position it leads to.
    Choice { targets: Vec<(usize, BTreeSet<usize>)> },
}

pub(crate) struct Tableau<'a> {
    pub cl: &'a Closure,
    pub game: ParityGame,
    pub kind: Vec<NodeKind>,
    pub steps: HashMap<u64, Rc<ModalStep>>,
    pub automaton_states: usize,
}

pub(crate) fn members(seq: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| seq & (1 << i) != 0)
}

fn bit(i: usize) -> u64 {
    1 << i
}

fn dominates(a: &[BTreeSet<usize>], b: &[BTreeSet<usize>]) -> bool {
    a.iter().all(|ta| b.iter().any(|tb| tb.is_subset(ta)))
}

/// Drops conclusions that contain another conclusion of the same instance,
/// and instances for which another instance is at least as hard for Eloise.
pub fn prune(instances: Vec<Vec<BTreeSet<usize>>>) -> Vec<Vec<BTreeSet<usize>>> {
    let mut reduced: Vec<Vec<BTreeSet<usize>>> = instances
        .into_iter()
        .map(|thetas| {
            let mut keep: Vec<BTreeSet<usize>> =
                thetas.iter().filter(|t| !thetas.iter().any(|u| u.len() < t.len() && u.is_subset(t))).cloned().collect();
            keep.sort();
            keep.dedup();
            keep
        })
        .collect();
    reduced.sort();
    reduced.dedup();
    let n = reduced.len();
    let mut alive = vec![true; n];
    for b in 0..n {
        alive[b] = !(0..n).any(|a| {
            a != b && alive[a] && dominates(&reduced[a], &reduced[b]) && !(dominates(&reduced[b], &reduced[a]) && b < a)
        });
    }
    reduced.into_iter().zip(alive).filter(|(_, k)| *k).map(|(r, _)| r).collect()
}

impl<'a> Tableau<'a> {
    pub fn build(cl: &'a Closure, sig: &Signature, budget: &Budget) -> Result<Tableau<'a>, String> {
        let has_mu = (0..cl.len()).any(|i| cl.is_fixpoint(i) && cl.priority[i] % 2 == 1);
        let mut det = has_mu.then(|| Determinizer::new(Tracker { cl }, budget.automaton));
        let mut t = Tableau { cl, game: ParityGame::new(), kind: Vec::new(), steps: HashMap::new(), automaton_states: 1 };
        let mut index: HashMap<(u64, usize, u32), usize> = HashMap::new();
        let mut queue: Vec<(usize, u64, usize)> = Vec::new();

        let mut position = |t: &mut Tableau, seq: u64, d: usize, prio: u32, queue: &mut Vec<(usize, u64, usize)>| {
            if let Some(&v) = index.get(&(seq, d, prio)) {
                return Ok(v);
            }
            if t.game.len() >= budget.nodes {
                return Err(format!("tableau game exceeds {} nodes", budget.nodes));
            }
            let v = t.game.add_node(Owner::Eloise, prio);
            t.kind.push(NodeKind::Pos { seq, modal: false });
            index.insert((seq, d, prio), v);
            queue.push((v, seq, d));
            Ok(v)
        };
        let advance = |det: &mut Option<Determinizer<Tracker<'a>>>, d: usize, letter: &Letter| match det {
            None => Ok((0, 0)),
            Some(det) => det
                .step(d, letter)
                .map(|(d2, p)| (d2, p - 1))
                .map_err(|e| format!("tracking automaton exceeds {} states", e.0)),
        };

        let root = position(&mut t, bit(0), 0, 0, &mut queue)?;
        debug_assert_eq!(root, 0);
        while let Some((v, seq, d)) = queue.pop() {
            let f = |i: usize| &cl.formulas[i];
            let clash = members(seq).any(|i| match f(i) {
                Formula::Bot => true,
                Formula::Atom(p) => members(seq).any(|j| matches!(f(j), Formula::NegAtom(q) if q == p)),
                _ => false,
            });
            if clash {
                continue;
            }
            let principal = members(seq).find(|&i| !cl.is_modal(i) && !cl.is_literal(i));
            if let Some(i) = principal {
                let rest = seq & !bit(i);
                let carried: Letter = members(rest).map(|j| (j, j)).collect();
                let options: Vec<Vec<usize>> = match f(i) {
                    Formula::Or(..) => cl.succ[i].iter().map(|&c| vec![c]).collect(),
                    _ => vec![cl.succ[i].clone()],
                };
                for results in options {
                    let mut letter = carried.clone();
                    letter.extend(results.iter().map(|&c| (i, c)));
                    let next = results.iter().fold(rest, |s, &c| s | bit(c));
                    let (d2, p) = advance(&mut det, d, &letter)?;
                    let w = position(&mut t, next, d2, p, &mut queue)?;
                    t.game.add_edge(v, w);
                }
                continue;
            }
            t.game.nodes[v].owner = Owner::Abelard;
            t.kind[v] = NodeKind::Pos { seq, modal: true };
            let modal = seq & members(seq).filter(|&i| cl.is_modal(i)).fold(0, |s, i| s | bit(i));
            if modal == 0 {
                continue;
            }
            let step = match t.steps.get(&modal) {
                Some(s) => s.clone(),
                None => {
                    let s = Rc::new(modal_step(cl, sig, modal));
                    t.steps.insert(modal, s.clone());
                    s
                }
            };
            for thetas in &step.instances {
                if t.game.len() >= budget.nodes {
                    return Err(format!("tableau game exceeds {} nodes", budget.nodes));
                }
                let c = t.game.add_node(Owner::Eloise, 0);
                t.kind.push(NodeKind::Choice { targets: Vec::new() });
                t.game.add_edge(v, c);
                let mut targets = Vec::new();
                for theta in thetas {
                    let letter: Letter = theta.iter().map(|&j| (step.formulas[j], cl.succ[step.formulas[j]][0])).collect();
                    let next = letter.iter().fold(0, |s, &(_, a)| s | bit(a));
                    let (d2, p) = advance(&mut det, d, &letter)?;
                    let w = position(&mut t, next, d2, p, &mut queue)?;
                    t.game.add_edge(c, w);
                    targets.push((w, theta.clone()));
                }
                t.kind[c] = NodeKind::Choice { targets };
            }
        }
        t.automaton_states = det.map_or(1, |d| d.len());
        Ok(t)
    }
}

fn modal_step(cl: &Closure, sig: &Signature, modal: u64) -> ModalStep {
    let formulas: Vec<usize> = members(modal).collect();
    let xi: Vec<ModalAtom> = formulas
        .iter()
        .map(|&i| match &cl.formulas[i] {
            Formula::Box(m, _) => ModalAtom::new(Polarity::Box, m.clone(), &format!("m{i}")),
            Formula::Diamond(m, _) => ModalAtom::new(Polarity::Diamond, m.clone(), &format!("m{i}")),
            _ => unreachable!("modal formula expected"),
        })
        .collect();
    let instances = prune(match_rules(sig, &xi).iter().map(|r| r.theta_indices()).collect());
    ModalStep { formulas, xi, instances }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn harder_instances_subsume_easier_ones() {
        let easy = vec![set(&[0])];
        let hard = vec![set(&[0, 1])];
        assert_eq!(prune(vec![easy.clone(), hard.clone()]), vec![hard]);
    }

    #[test]
    fn superset_conclusions_are_dropped() {
        assert_eq!(prune(vec![vec![set(&[0, 1]), set(&[0])]]), vec![vec![set(&[0])]]);
    }
}
