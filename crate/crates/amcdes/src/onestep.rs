//! The one-step logic: modal atoms over propositional variables, their
//! evaluation over one-step games, the rules (ℓS) and (ℓC), the one-step
//! satisfiability decision, and the colored-moves witness construction.
//!
//! The plain coalition-logic rules (CD) and (C) are the instances of (ℓS)
//! and (ℓC) in which no atom carries a commitment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::cgses::assignments;
use crate::error::OneStepError;
use crate::formula::{parse_infer, Coalition, Formula, JointExplicit, Modality, Signature};

/// Valuation of propositional variables as subsets of the carrier.
pub type Tau = BTreeMap<String, BTreeSet<usize>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Box,
    Diamond,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModalAtom {
    pub polarity: Polarity,
    pub modality: Modality,
    pub var: String,
}

impl ModalAtom {
    pub fn new(polarity: Polarity, modality: Modality, var: &str) -> ModalAtom {
        ModalAtom { polarity, modality, var: var.to_string() }
    }

    pub fn is_grand(&self, sig: &Signature) -> bool {
        self.modality.is_grand(sig)
    }

    pub fn to_formula(&self) -> Formula {
        let a = Formula::atom(&self.var);
        match self.polarity {
            Polarity::Box => Formula::boxed(self.modality.clone(), a),
            Polarity::Diamond => Formula::diamond(self.modality.clone(), a),
        }
    }

    /// Reads `[C,O] a` or `<C,O> a` for a propositional variable `a`.
    pub fn from_formula(f: &Formula) -> Option<ModalAtom> {
        match f {
            Formula::Box(m, a) => match a.as_ref() {
                Formula::Atom(v) => Some(ModalAtom::new(Polarity::Box, m.clone(), v)),
                _ => None,
            },
            Formula::Diamond(m, a) => match a.as_ref() {
                Formula::Atom(v) => Some(ModalAtom::new(Polarity::Diamond, m.clone(), v)),
                _ => None,
            },
            _ => None,
        }
    }

    fn coalition(&self) -> Coalition {
        self.modality.coalition
    }

    fn committed(&self) -> Coalition {
        self.modality.commitment.agents()
    }

    fn moves(&self) -> &[JointExplicit] {
        self.modality.commitment.moves()
    }
}

/// A one-step game with explicit strategies over the carrier `0..carrier`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneStepGame {
    pub carrier: usize,
    pub k: Vec<usize>,
    /// Outcome per joint move, flattened with agent 0 most significant.
    pub f: Vec<usize>,
    /// `interp[j][x]`: move of agent `j` interpreting its explicit move `x`.
    pub interp: Vec<Vec<usize>>,
    /// Optional human-readable move labels, shared by all agents.
    pub labels: Vec<String>,
}

impl OneStepGame {
    pub fn n_agents(&self) -> usize {
        self.k.len()
    }

    pub fn flat(&self, m: &[usize]) -> usize {
        m.iter().zip(&self.k).fold(0, |acc, (&i, &k)| acc * k + i)
    }

    pub fn outcome(&self, m: &[usize]) -> usize {
        self.f[self.flat(m)]
    }
}

fn box_holds(m: &Modality, g: &OneStepGame, y: &[bool]) -> bool {
    let c: Vec<usize> = m.coalition.iter().collect();
    let all: Vec<usize> = (0..g.n_agents()).collect();
    let fulls = assignments(&all, &g.k);
    assignments(&c, &g.k).iter().any(|mc| {
        fulls.iter().all(|full| {
            let extends = c.iter().zip(mc).all(|(&a, &i)| full[a] == i);
            let committed = m
                .commitment
                .moves()
                .iter()
                .any(|o| o.0.iter().all(|&(a, x)| full[a] == g.interp[a][x]));
            !(extends && committed) || y[g.outcome(full)]
        })
    })
}

/// Evaluates the predicate lifting of `atom` at `g` under `tau`.
pub fn lifting_holds(atom: &ModalAtom, g: &OneStepGame, tau: &Tau) -> bool {
    let set = tau.get(&atom.var);
    let y: Vec<bool> = (0..g.carrier).map(|w| set.map_or(false, |s| s.contains(&w))).collect();
    match atom.polarity {
        Polarity::Box => box_holds(&atom.modality, g, &y),
        Polarity::Diamond => {
            let not_y: Vec<bool> = y.iter().map(|b| !b).collect();
            !box_holds(&atom.modality, g, &not_y)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKind {
    /// (ℓS): no distinguished diamond.
    LS,
    /// (ℓC): a distinguished diamond `<E, Q_K> b`.
    LC,
}

/// The conclusion for one `q ∈ Q_K`: the boxes `I_q` and grand diamonds `J_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Conclusion {
    pub q: JointExplicit,
    pub boxes: Vec<usize>,
    pub grand: Vec<usize>,
}

/// A rule match; atoms are referenced by their index in `Ξ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleInstance {
    pub kind: RuleKind,
    pub boxes: Vec<usize>,
    pub diamond: Option<usize>,
    pub grand: Vec<usize>,
    /// Witness joint explicit move for `E ∩ L`.
    pub l: JointExplicit,
    pub conclusions: Vec<Conclusion>,
}

impl RuleInstance {
    pub fn premise(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.boxes.iter().chain(&self.grand).chain(&self.diamond).copied().collect();
        v.sort();
        v
    }

    /// The conclusions `Θ_q` as sets of atom indices.
    pub fn theta_indices(&self) -> Vec<BTreeSet<usize>> {
        self.conclusions
            .iter()
            .map(|c| c.boxes.iter().chain(&c.grand).chain(&self.diamond).copied().collect())
            .collect()
    }

    /// The conclusions `Θ_q` as sets of variables.
    pub fn thetas(&self, xi: &[ModalAtom]) -> Vec<BTreeSet<String>> {
        self.theta_indices()
            .into_iter()
            .map(|t| t.into_iter().map(|i| xi[i].var.clone()).collect())
            .collect()
    }
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &i in items {
        let more: Vec<Vec<usize>> = out
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.push(i);
                s
            })
            .collect();
        out.extend(more);
    }
    out
}

/// Joint explicit moves for `agents` that can agree with some named move of
/// the selected atoms. Other names cannot help: every agent of `L` is
/// constrained to equal a named component.
fn candidate_ls(agents: Coalition, xi: &[ModalAtom], selected: &[usize]) -> Vec<JointExplicit> {
    let list: Vec<usize> = agents.iter().collect();
    let names: Vec<Vec<usize>> = list
        .iter()
        .map(|&a| {
            let set: BTreeSet<usize> = selected
                .iter()
                .flat_map(|&i| xi[i].moves().iter().filter_map(move |o| o.get(a)))
                .collect();
            set.into_iter().collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for (idx, &a) in list.iter().enumerate() {
        out = out
            .into_iter()
            .flat_map(|v: Vec<(usize, usize)>| {
                names[idx].iter().map(move |&x| {
                    let mut v = v.clone();
                    v.push((a, x));
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(JointExplicit).collect()
}

fn enumerate(sig: &Signature, xi: &[ModalAtom], with_grand: bool) -> Vec<RuleInstance> {
    let boxes: Vec<usize> = (0..xi.len()).filter(|&i| xi[i].polarity == Polarity::Box).collect();
    let diamonds: Vec<usize> = (0..xi.len()).filter(|&i| xi[i].polarity == Polarity::Diamond).collect();
    let grand: Vec<usize> = if with_grand {
        diamonds.iter().copied().filter(|&i| xi[i].is_grand(sig)).collect()
    } else {
        Vec::new()
    };
    let mut out = BTreeSet::new();
    for bs in subsets(&boxes) {
        let disjoint = bs.iter().enumerate().all(|(x, &i)| {
            bs[x + 1..].iter().all(|&j| xi[i].coalition().inter(xi[j].coalition()).is_empty())
        });
        if !disjoint {
            continue;
        }
        let d_union = bs.iter().fold(Coalition::EMPTY, |c, &i| c.union(xi[i].coalition()));
        for gs in subsets(&grand) {
            let l_agents = bs.iter().chain(&gs).fold(Coalition::EMPTY, |c, &i| c.union(xi[i].committed()));
            if !d_union.inter(l_agents).is_empty() {
                continue;
            }
            let selected: Vec<usize> = bs.iter().chain(&gs).copied().collect();
            if !selected.is_empty() {
                for l in candidate_ls(l_agents, xi, &selected) {
                    let ok = bs.iter().all(|&j| xi[j].moves().iter().any(|p| p.compatible(&l)))
                        && gs.iter().all(|&j| xi[j].moves()[0].compatible(&l));
                    if ok {
                        out.insert(RuleInstance {
                            kind: RuleKind::LS,
                            boxes: bs.clone(),
                            diamond: None,
                            grand: gs.clone(),
                            l: JointExplicit::default(),
                            conclusions: vec![Conclusion {
                                q: JointExplicit::default(),
                                boxes: bs.clone(),
                                grand: gs.clone(),
                            }],
                        });
                        break;
                    }
                }
            }
            for &d in &diamonds {
                if gs.contains(&d) {
                    continue;
                }
                let e = xi[d].coalition();
                let k = xi[d].committed();
                if !d_union.is_subset(e) || !l_agents.is_subset(e.union(k)) {
                    continue;
                }
                for l in candidate_ls(e.inter(l_agents), xi, &selected) {
                    let conclusions = xi[d]
                        .moves()
                        .iter()
                        .map(|q| Conclusion {
                            q: q.clone(),
                            boxes: bs
                                .iter()
                                .copied()
                                .filter(|&j| {
                                    xi[j].moves().iter().any(|p| p.compatible(q) && p.compatible(&l))
                                })
                                .collect(),
                            grand: gs
                                .iter()
                                .copied()
                                .filter(|&j| {
                                    let r = &xi[j].moves()[0];
                                    r.compatible(q) && r.compatible(&l)
                                })
                                .collect(),
                        })
                        .collect();
                    out.insert(RuleInstance {
                        kind: RuleKind::LC,
                        boxes: bs.clone(),
                        diamond: Some(d),
                        grand: gs.clone(),
                        l,
                        conclusions,
                    });
                }
            }
        }
    }
    dedup_by_conclusions(out.into_iter().collect())
}

// Instances that differ only in the witness `l` are interchangeable.
fn dedup_by_conclusions(v: Vec<RuleInstance>) -> Vec<RuleInstance> {
    let mut seen = BTreeSet::new();
    v.into_iter()
        .filter(|r| seen.insert((r.kind, r.premise(), r.diamond, r.conclusions.clone())))
        .collect()
}

/// All instances of (ℓS) and (ℓC) with premise contained in `xi`, with
/// maximal index sets `I_q`, `J_q` for each premise and witness `l`.
/// Instances with an empty premise are omitted.
pub fn match_rules(sig: &Signature, xi: &[ModalAtom]) -> Vec<RuleInstance> {
    enumerate(sig, xi, true)
}

/// A one-step satisfiability problem: atoms `Ξ` and a valuation `τ` into
/// subsets of `0..carrier`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneStepProblem {
    pub sig: Signature,
    pub atoms: Vec<ModalAtom>,
    pub tau: Tau,
    pub carrier: usize,
}

impl OneStepProblem {
    pub fn new(sig: Signature, atoms: Vec<ModalAtom>, tau: Tau, carrier: usize) -> Result<Self, OneStepError> {
        let p = OneStepProblem { sig, atoms, tau, carrier };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), OneStepError> {
        let mut vars = BTreeSet::new();
        for a in &self.atoms {
            if !vars.insert(a.var.as_str()) {
                return Err(OneStepError::Invalid(format!("variable {} is used twice", a.var)));
            }
            a.modality.check(&self.sig).map_err(|e| OneStepError::Invalid(e.to_string()))?;
        }
        if let Some((v, _)) = self.tau.iter().find(|(_, s)| s.iter().any(|&w| w >= self.carrier)) {
            return Err(OneStepError::Invalid(format!("tau({v}) leaves the carrier")));
        }
        Ok(())
    }

    fn mask(&self, var: &str) -> Vec<bool> {
        let set = self.tau.get(var);
        (0..self.carrier).map(|w| set.map_or(false, |s| s.contains(&w))).collect()
    }

    fn theta_nonempty(&self, theta: &BTreeSet<String>) -> bool {
        (0..self.carrier).any(|w| theta.iter().all(|v| self.tau.get(v).map_or(false, |s| s.contains(&w))))
    }

    /// Reads the textual format:
    ///
    /// ```text
    /// agents A B C        # optional, fixes agent order
    /// moves B m n         # optional, fixes move order
    /// carrier 2
    /// [A, (B:m)] a
    /// <{A,B}> b
    /// tau a 0 1
    /// tau b 1
    /// ```
    pub fn parse(text: &str) -> Result<OneStepProblem, OneStepError> {
        let bad = |n: usize, m: &str| OneStepError::Invalid(format!("line {}: {m}", n + 1));
        let mut sig = Signature::default();
        let mut atoms = Vec::new();
        let mut tau = Tau::new();
        let mut carrier = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            match words.next() {
                Some("agents") => {
                    for a in words {
                        sig.add_agent(a);
                    }
                }
                Some("moves") => {
                    let a = words.next().ok_or_else(|| bad(n, "moves needs an agent"))?;
                    let a = sig.add_agent(a);
                    for m in words {
                        sig.add_move(a, m);
                    }
                }
                Some("carrier") => {
                    let v = words.next().and_then(|w| w.parse().ok()).ok_or_else(|| bad(n, "bad carrier size"))?;
                    carrier = Some(v);
                }
                Some("tau") => {
                    let var = words.next().ok_or_else(|| bad(n, "tau needs a variable"))?;
                    let set: Result<BTreeSet<usize>, _> = words.map(|w| w.parse::<usize>()).collect();
                    tau.insert(var.to_string(), set.map_err(|_| bad(n, "bad carrier element"))?);
                }
                _ => {
                    let f = parse_infer(line, &mut sig).map_err(|e| bad(n, &e.to_string()))?;
                    atoms.push(ModalAtom::from_formula(&f).ok_or_else(|| bad(n, "expected a modal atom"))?);
                }
            }
        }
        let carrier = carrier.ok_or_else(|| OneStepError::Invalid("missing carrier line".into()))?;
        OneStepProblem::new(sig, atoms, tau, carrier)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "agents {}", self.sig.agents.join(" "));
        for (a, ms) in self.sig.agents.iter().zip(&self.sig.moves) {
            if !ms.is_empty() {
                let _ = writeln!(s, "moves {a} {}", ms.join(" "));
            }
        }
        let _ = writeln!(s, "carrier {}", self.carrier);
        for a in &self.atoms {
            let _ = writeln!(s, "{}", a.to_formula().display(&self.sig));
        }
        for (v, set) in &self.tau {
            let elems: Vec<String> = set.iter().map(|w| w.to_string()).collect();
            let _ = writeln!(s, "tau {v} {}", elems.join(" "));
        }
        s
    }
}

/// `Ξ` is satisfiable under `τ` iff every rule instance has a conclusion
/// with non-empty extension.
pub fn one_step_sat(p: &OneStepProblem) -> bool {
    match_rules(&p.sig, &p.atoms)
        .iter()
        .all(|r| r.thetas(&p.atoms).iter().any(|t| p.theta_nonempty(t)))
}

/// Decision without grand-coalition diamonds in the enumeration: when `Ξ`
/// has no grand-coalition atoms, the literals `<N> c_j` never arise. Returns
/// `None` if `Ξ` contains a grand-coalition atom.
pub fn one_step_sat_grand_free(p: &OneStepProblem) -> Option<bool> {
    if p.atoms.iter().any(|a| a.is_grand(&p.sig)) {
        return None;
    }
    Some(
        enumerate(&p.sig, &p.atoms, false)
            .iter()
            .all(|r| r.thetas(&p.atoms).iter().any(|t| p.theta_nonempty(t))),
    )
}

/// Upper bound on the number of cells of a constructed game.
const MAX_CELLS: usize = 1 << 22;

/// The move layout of the colored-moves construction, shared by all agents.
#[derive(Clone, Debug)]
pub struct ColoredMoves {
    pub labels: Vec<String>,
    pub color: Vec<usize>,
    /// Index of the witness move `(e^j, 0)` per box, in atom order.
    pub box_move: BTreeMap<usize, usize>,
    /// Index of `(g^j, 0)` per diamond; `(g^j, u)` is at offset `u`.
    pub diamond_base: BTreeMap<usize, usize>,
    /// Index of `(x, 0)` per named move `(agent, x)` occurring in `Ξ`.
    pub named: BTreeMap<(usize, usize), usize>,
    /// Number of colors `β`.
    pub beta: usize,
}

impl ColoredMoves {
    pub fn new(sig: &Signature, xi: &[ModalAtom]) -> ColoredMoves {
        let mut cm = ColoredMoves {
            labels: Vec::new(),
            color: Vec::new(),
            box_move: BTreeMap::new(),
            diamond_base: BTreeMap::new(),
            named: BTreeMap::new(),
            beta: xi.iter().filter(|a| a.polarity == Polarity::Diamond).count(),
        };
        for (i, a) in xi.iter().enumerate().filter(|(_, a)| a.polarity == Polarity::Box) {
            cm.box_move.insert(i, cm.labels.len());
            cm.labels.push(format!("e[{}]", a.var));
            cm.color.push(0);
        }
        let names: BTreeSet<(usize, usize)> =
            xi.iter().flat_map(|a| a.moves().iter().flat_map(|o| o.0.iter().copied())).collect();
        for (a, x) in names {
            cm.named.insert((a, x), cm.labels.len());
            cm.labels.push(format!("{}:{}", sig.agents[a], sig.moves[a][x]));
            cm.color.push(0);
        }
        for (i, a) in xi.iter().enumerate().filter(|(_, a)| a.polarity == Polarity::Diamond) {
            cm.diamond_base.insert(i, cm.labels.len());
            for u in 0..cm.beta {
                cm.labels.push(format!("g[{}]#{u}", a.var));
                cm.color.push(u);
            }
        }
        if cm.labels.is_empty() {
            cm.labels.push("*".into());
            cm.color.push(0);
        }
        cm
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Move interpretation: named moves map to their symbol, others to 0.
    pub fn interp(&self, sig: &Signature) -> Vec<Vec<usize>> {
        (0..sig.n_agents())
            .map(|a| (0..sig.moves[a].len()).map(|x| self.named.get(&(a, x)).copied().unwrap_or(0)).collect())
            .collect()
    }

    /// Skolem function of diamond `d` (with position `j` among the diamonds)
    /// on the agents outside `C ∪ H`, given a joint move of `C`: the least
    /// such agent plays `(g, u_j - col(m_C))`, the others `(g, 0)`.
    pub fn skolem(&self, d: usize, j: usize, rest: &[usize], mc_color: usize) -> Vec<(usize, usize)> {
        let base = self.diamond_base[&d];
        rest.iter()
            .enumerate()
            .map(|(i, &a)| {
                let u = if i == 0 { (j + self.beta - mc_color % self.beta) % self.beta } else { 0 };
                (a, base + u)
            })
            .collect()
    }
}

/// Builds the colored-moves witness game for a satisfiable problem and
/// checks every atom on it.
pub fn extract_one_step_model(p: &OneStepProblem) -> Result<OneStepGame, OneStepError> {
    p.validate()?;
    if !one_step_sat(p) {
        return Err(OneStepError::Unsatisfiable);
    }
    let g = colored_game(p, &ColoredMoves::new(&p.sig, &p.atoms))?;
    for a in &p.atoms {
        if !lifting_holds(a, &g, &p.tau) {
            return Err(OneStepError::Internal(format!("atom over {} fails on the witness", a.var)));
        }
    }
    Ok(g)
}

/// Solves the ground clauses of `Ξ` over a given colored move layout.
pub fn colored_game(p: &OneStepProblem, cm: &ColoredMoves) -> Result<OneStepGame, OneStepError> {
    let n = p.sig.n_agents();
    let kk = cm.len();
    let cells = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(kk)).filter(|&c| c <= MAX_CELLS);
    let Some(cells) = cells else {
        return Err(OneStepError::Invalid("witness game is too large".into()));
    };
    let k = vec![kk; n];
    let interp = cm.interp(&p.sig);
    let flat = |m: &[usize]| m.iter().fold(0, |acc, &i| acc * kk + i);
    let mut allowed: Vec<Vec<bool>> = vec![vec![true; p.carrier]; cells];
    let restrict = |cell: &mut Vec<bool>, mask: &[bool]| {
        for (c, m) in cell.iter_mut().zip(mask) {
            *c &= *m;
        }
    };
    for (&i, &e) in &cm.box_move {
        let a = &p.atoms[i];
        let mask = p.mask(&a.var);
        let bound = a.coalition().union(a.committed());
        let free: Vec<usize> = (0..n).filter(|&x| !bound.contains(x)).collect();
        for o in a.moves() {
            let mut full = vec![0; n];
            for x in a.coalition().iter() {
                full[x] = e;
            }
            for &(x, m) in &o.0 {
                full[x] = interp[x][m];
            }
            for asg in assignments(&free, &k) {
                for (&x, &v) in free.iter().zip(&asg) {
                    full[x] = v;
                }
                restrict(&mut allowed[flat(&full)], &mask);
            }
        }
    }
    let mut clauses: Vec<(Vec<usize>, Vec<bool>)> = Vec::new();
    for (j, (&i, _)) in cm.diamond_base.iter().enumerate() {
        let a = &p.atoms[i];
        let mask = p.mask(&a.var);
        let c: Vec<usize> = a.coalition().iter().collect();
        let bound = a.coalition().union(a.committed());
        let rest: Vec<usize> = (0..n).filter(|&x| !bound.contains(x)).collect();
        for mc in assignments(&c, &k) {
            let col: usize = mc.iter().map(|&m| cm.color[m]).sum();
            let mut full = vec![0; n];
            for (&x, &v) in c.iter().zip(&mc) {
                full[x] = v;
            }
            for (x, v) in cm.skolem(i, j, &rest, col) {
                full[x] = v;
            }
            let mut cells_r = Vec::new();
            for r in a.moves() {
                for &(x, m) in &r.0 {
                    full[x] = interp[x][m];
                }
                cells_r.push(flat(&full));
            }
            if cells_r.len() == 1 {
                restrict(&mut allowed[cells_r[0]], &mask);
            } else {
                clauses.push((cells_r, mask.clone()));
            }
        }
    }
    if let Some(y) = allowed.iter().position(|s| !s.iter().any(|b| *b)) {
        return Err(OneStepError::Internal(format!("no admissible outcome for joint move {y}")));
    }
    fn solve(clauses: &[(Vec<usize>, Vec<bool>)], i: usize, allowed: &mut Vec<Vec<bool>>) -> bool {
        let Some((cells, mask)) = clauses.get(i) else {
            return true;
        };
        for &y in cells {
            let next: Vec<bool> = allowed[y].iter().zip(mask).map(|(a, b)| *a && *b).collect();
            if next.iter().any(|b| *b) {
                let old = std::mem::replace(&mut allowed[y], next);
                if solve(clauses, i + 1, allowed) {
                    return true;
                }
                allowed[y] = old;
            }
        }
        false
    }
    if !solve(&clauses, 0, &mut allowed) {
        return Err(OneStepError::Internal("disjunctive clauses cannot be satisfied".into()));
    }
    let f = allowed.iter().map(|s| s.iter().position(|b| *b).unwrap()).collect();
    Ok(OneStepGame { carrier: p.carrier, k, f, interp, labels: cm.labels.clone() })
}
