//! Model checking over concurrent game structures with explicit strategies.
//!
//! Three engines compute the same extension: [`eval`] follows the semantic
//! clauses literally, [`eval_one_step`] evaluates modalities with the
//! one-step satisfaction algorithm, and [`game_check`] solves a parity game
//! assembled from one-step satisfaction arenas.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::cgses::{assignments, Cgses, JointMove};
use crate::error::{FormulaError, McError};
use crate::formula::{closure, Formula, Modality};
use crate::games::{Owner, ParityGame};

/// Values of free fixpoint variables.
pub type Valuation = BTreeMap<String, BTreeSet<usize>>;

fn check(phi: &Formula, s: &Cgses, sigma: &Valuation) -> Result<(), McError> {
    if let Some(x) = phi.free_vars().into_iter().find(|x| !sigma.contains_key(x)) {
        return Err(FormulaError::UnboundVariable(x).into());
    }
    for m in phi.modalities() {
        m.check(&s.sig).map_err(|e| McError::Signature(e.to_string()))?;
    }
    if sigma.values().flatten().any(|&w| w >= s.n_states()) {
        return Err(McError::Signature("valuation mentions an unknown state".into()));
    }
    Ok(())
}

fn interpreted_commitment(s: &Cgses, w: usize, m: &Modality) -> Vec<JointMove> {
    m.commitment.moves().iter().map(|o| s.interpret_joint(w, o)).collect()
}

/// Algorithm 1: is there a joint move of `C` such that every outcome under
/// every committed joint move and every move of the remaining agents lies in `y`?
pub fn one_step_sat(s: &Cgses, w: usize, m: &Modality, y: &[bool]) -> bool {
    let st = &s.states[w];
    let n = s.n_agents();
    let c: Vec<usize> = m.coalition.iter().collect();
    let bound = m.coalition.union(m.commitment.agents());
    let rest: Vec<usize> = (0..n).filter(|&a| !bound.contains(a)).collect();
    let os = interpreted_commitment(s, w, m);
    let rests = assignments(&rest, &st.k);
    let mut full = vec![0; n];
    'mc: for mc in assignments(&c, &st.k) {
        for (&a, &i) in c.iter().zip(&mc) {
            full[a] = i;
        }
        for o in &os {
            for &(a, i) in &o.0 {
                full[a] = i;
            }
            for mr in &rests {
                for (&a, &i) in rest.iter().zip(mr) {
                    full[a] = i;
                }
                if !y[s.outcome(w, &full)] {
                    continue 'mc;
                }
            }
        }
        return true;
    }
    false
}

/// Box clause read off the definition: quantifies over full joint moves.
fn box_semantic(s: &Cgses, w: usize, m: &Modality, y: &[bool]) -> bool {
    let st = &s.states[w];
    let c: Vec<usize> = m.coalition.iter().collect();
    let os = interpreted_commitment(s, w, m);
    let all: Vec<usize> = (0..s.n_agents()).collect();
    let fulls = assignments(&all, &st.k);
    assignments(&c, &st.k).iter().any(|mc| {
        fulls.iter().all(|full| {
            let extends = c.iter().zip(mc).all(|(&a, &i)| full[a] == i);
            let committed = os.iter().any(|o| o.0.iter().all(|&(a, i)| full[a] == i));
            !(extends && committed) || y[s.outcome(w, full)]
        })
    })
}

fn diamond_semantic(s: &Cgses, w: usize, m: &Modality, y: &[bool]) -> bool {
    let st = &s.states[w];
    let c: Vec<usize> = m.coalition.iter().collect();
    let os = interpreted_commitment(s, w, m);
    let all: Vec<usize> = (0..s.n_agents()).collect();
    let fulls = assignments(&all, &st.k);
    assignments(&c, &st.k).iter().all(|mc| {
        fulls.iter().any(|full| {
            c.iter().zip(mc).all(|(&a, &i)| full[a] == i)
                && os.iter().any(|o| o.0.iter().all(|&(a, i)| full[a] == i))
                && y[s.outcome(w, full)]
        })
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Engine {
    Semantic,
    OneStep,
}

struct Evaluator<'a> {
    s: &'a Cgses,
    engine: Engine,
    env: HashMap<String, Vec<bool>>,
}

impl Evaluator<'_> {
    fn go(&mut self, f: &Formula) -> Vec<bool> {
        let n = self.s.n_states();
        let s = self.s;
        match f {
            Formula::Top => vec![true; n],
            Formula::Bot => vec![false; n],
            Formula::Atom(p) => s.states.iter().map(|st| st.atoms.contains(p)).collect(),
            Formula::NegAtom(p) => s.states.iter().map(|st| !st.atoms.contains(p)).collect(),
            Formula::Var(x) => self.env[x].clone(),
            Formula::And(a, b) => {
                let (a, b) = (self.go(a), self.go(b));
                a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.go(a), self.go(b));
                a.iter().zip(&b).map(|(x, y)| *x || *y).collect()
            }
            Formula::Box(m, a) => {
                let y = self.go(a);
                (0..n)
                    .map(|w| match self.engine {
                        Engine::Semantic => box_semantic(s, w, m, &y),
                        Engine::OneStep => one_step_sat(s, w, m, &y),
                    })
                    .collect()
            }
            Formula::Diamond(m, a) => {
                let y = self.go(a);
                let not_y: Vec<bool> = y.iter().map(|b| !b).collect();
                (0..n)
                    .map(|w| match self.engine {
                        Engine::Semantic => diamond_semantic(s, w, m, &y),
                        Engine::OneStep => !one_step_sat(s, w, m, &not_y),
                    })
                    .collect()
            }
            Formula::Mu(x, a) | Formula::Nu(x, a) => {
                let mut cur = vec![matches!(f, Formula::Nu(..)); n];
                let saved = self.env.remove(x);
                loop {
                    self.env.insert(x.clone(), cur.clone());
                    let next = self.go(a);
                    if next == cur {
                        break;
                    }
                    cur = next;
                }
                self.env.remove(x);
                if let Some(v) = saved {
                    self.env.insert(x.clone(), v);
                }
                cur
            }
        }
    }
}

fn run(phi: &Formula, s: &Cgses, sigma: &Valuation, engine: Engine) -> Result<BTreeSet<usize>, McError> {
    check(phi, s, sigma)?;
    let n = s.n_states();
    let env = sigma
        .iter()
        .map(|(x, ws)| (x.clone(), (0..n).map(|w| ws.contains(&w)).collect()))
        .collect();
    let mut ev = Evaluator { s, engine, env };
    Ok(to_set(&ev.go(phi)))
}

fn to_set(v: &[bool]) -> BTreeSet<usize> {
    v.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect()
}

/// The extension of `phi`, by Kleene iteration over the semantic clauses.
pub fn eval(phi: &Formula, s: &Cgses, sigma: &Valuation) -> Result<BTreeSet<usize>, McError> {
    run(phi, s, sigma, Engine::Semantic)
}

/// Bottom-up evaluation driven by [`one_step_sat`].
pub fn eval_one_step(phi: &Formula, s: &Cgses, sigma: &Valuation) -> Result<BTreeSet<usize>, McError> {
    run(phi, s, sigma, Engine::OneStep)
}

/// The one-step satisfaction arena of a modality at a state: the initial node
/// chooses an inner node (a joint move of the coalition), which in turn leads
/// to the outcome states in `succ`.
#[derive(Clone, Debug)]
pub struct Arena {
    pub inner: Vec<JointMove>,
    pub succ: Vec<BTreeSet<usize>>,
}

impl Arena {
    /// Whether the initial player can force the play into `y`.
    pub fn wins(&self, y: &[bool]) -> bool {
        self.succ.iter().any(|t| t.iter().all(|&v| y[v]))
    }
}

pub fn build_arena(s: &Cgses, w: usize, m: &Modality) -> Arena {
    let st = &s.states[w];
    let n = s.n_agents();
    let c: Vec<usize> = m.coalition.iter().collect();
    let bound = m.coalition.union(m.commitment.agents());
    let rest: Vec<usize> = (0..n).filter(|&a| !bound.contains(a)).collect();
    let os = interpreted_commitment(s, w, m);
    let rests = assignments(&rest, &st.k);
    let mut arena = Arena { inner: Vec::new(), succ: Vec::new() };
    let mut full = vec![0; n];
    for mc in assignments(&c, &st.k) {
        let mut targets = BTreeSet::new();
        for (&a, &i) in c.iter().zip(&mc) {
            full[a] = i;
        }
        for o in &os {
            for &(a, i) in &o.0 {
                full[a] = i;
            }
            for mr in &rests {
                for (&a, &i) in rest.iter().zip(mr) {
                    full[a] = i;
                }
                targets.insert(s.outcome(w, &full));
            }
        }
        arena.inner.push(JointMove(c.iter().copied().zip(mc).collect()));
        arena.succ.push(targets);
    }
    arena
}

/// The model-checking parity game of a closed formula, with the node of
/// `(formula, w)` at index `roots[w]`.
pub fn model_checking_game(phi: &Formula, s: &Cgses) -> Result<(ParityGame, Vec<usize>), McError> {
    check(phi, s, &Valuation::new())?;
    let cl = closure(phi);
    let n = s.n_states();
    let mut g = ParityGame::new();
    let mut node = vec![usize::MAX; cl.len() * n];
    for i in 0..cl.len() {
        for w in 0..n {
            let f = &cl.formulas[i];
            let owner = match f {
                Formula::Bot | Formula::Or(..) | Formula::Box(..) => Owner::Eloise,
                Formula::Atom(p) if !s.states[w].atoms.contains(p) => Owner::Eloise,
                Formula::NegAtom(p) if s.states[w].atoms.contains(p) => Owner::Eloise,
                Formula::Mu(..) | Formula::Nu(..) => Owner::Eloise,
                _ => Owner::Abelard,
            };
            node[i * n + w] = g.add_node(owner, cl.priority[i]);
        }
    }
    for i in 0..cl.len() {
        for w in 0..n {
            let v = node[i * n + w];
            match &cl.formulas[i] {
                Formula::And(..) | Formula::Or(..) | Formula::Mu(..) | Formula::Nu(..) => {
                    for &j in &cl.succ[i] {
                        g.add_edge(v, node[j * n + w]);
                    }
                }
                Formula::Box(m, _) | Formula::Diamond(m, _) => {
                    let j = cl.succ[i][0];
                    let inner_owner = g.nodes[v].owner.opponent();
                    for targets in build_arena(s, w, m).succ {
                        let u = g.add_node(inner_owner, 0);
                        g.add_edge(v, u);
                        for t in targets {
                            g.add_edge(u, node[j * n + t]);
                        }
                    }
                }
                _ => {}
            }
        }
    }
    Ok((g, (0..n).map(|w| node[w]).collect()))
}

/// Model checking by solving the parity game over arenas.
pub fn game_check(phi: &Formula, s: &Cgses) -> Result<BTreeSet<usize>, McError> {
    let (g, roots) = model_checking_game(phi, s)?;
    let sol = g.solve();
    Ok((0..s.n_states()).filter(|&w| sol.winner[roots[w]] == Owner::Eloise).collect())
}

/// Explicit moves `(agent, move)` mentioned anywhere in `phi`.
fn named_moves(phi: &Formula) -> BTreeSet<(usize, usize)> {
    phi.modalities()
        .iter()
        .flat_map(|m| m.commitment.moves().iter().flat_map(|j| j.0.clone()))
        .collect()
}

fn reachable(s: &Cgses, w: usize) -> Vec<usize> {
    let mut seen = vec![false; s.n_states()];
    let mut stack = vec![w];
    seen[w] = true;
    let mut out = Vec::new();
    while let Some(v) = stack.pop() {
        out.push(v);
        for &t in &s.states[v].outcome {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    out.sort();
    out
}

/// Open-interpretation model checking: searches for move interpretations
/// under which `w` satisfies the closed formula `phi`. Only the explicit
/// moves named in `phi` at states reachable from `w` are enumerated; all
/// other interpretations are fixed to move 0. Returns a witness model.
pub fn open_check(phi: &Formula, s: &Cgses, w: usize) -> Result<Option<Cgses>, McError> {
    check(phi, s, &Valuation::new())?;
    let names: Vec<(usize, usize)> = named_moves(phi).into_iter().collect();
    let states = reachable(s, w);
    let mut model = s.clone();
    model.has_interp = true;
    for st in &mut model.states {
        st.interp = s.sig.moves.iter().map(|ms| vec![0; ms.len()]).collect();
    }
    let per_state: Vec<Vec<Vec<usize>>> = states
        .iter()
        .map(|&v| {
            let k: Vec<usize> = names.iter().map(|&(a, _)| s.states[v].k[a]).collect();
            let idx: Vec<usize> = (0..names.len()).collect();
            assignments(&idx, &k)
        })
        .collect();
    let mut memo: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut choice = vec![0; states.len()];
    fn search(
        d: usize,
        states: &[usize],
        names: &[(usize, usize)],
        per_state: &[Vec<Vec<usize>>],
        choice: &mut Vec<usize>,
        model: &mut Cgses,
        memo: &mut HashMap<Vec<usize>, bool>,
        phi: &Formula,
        w: usize,
    ) -> bool {
        if d == states.len() {
            if let Some(&r) = memo.get(choice) {
                return r;
            }
            let r = eval(phi, model, &Valuation::new()).map(|e| e.contains(&w)).unwrap_or(false);
            memo.insert(choice.clone(), r);
            return r;
        }
        for (ci, assign) in per_state[d].iter().enumerate() {
            choice[d] = ci;
            for (&(a, x), &i) in names.iter().zip(assign) {
                model.states[states[d]].interp[a][x] = i;
            }
            if search(d + 1, states, names, per_state, choice, model, memo, phi, w) {
                return true;
            }
        }
        false
    }
    let found = search(0, &states, &names, &per_state, &mut choice, &mut model, &mut memo, phi, w);
    Ok(found.then_some(model))
}

/// `pre[C,O](Y)` as a set, used for direct fixpoint iterations.
pub fn pre(s: &Cgses, m: &Modality, y: &BTreeSet<usize>) -> BTreeSet<usize> {
    let yb: Vec<bool> = (0..s.n_states()).map(|w| y.contains(&w)).collect();
    (0..s.n_states()).filter(|&w| one_step_sat(s, w, m, &yb)).collect()
}
