//! Formulas of the alternating-time µ-calculus with disjunctive explicit
//! strategies, kept in negation normal form.

mod closure;
mod parse;
mod print;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

pub use closure::{closure, Closure};
pub use parse::{parse, parse_infer};

use crate::error::FormulaError;

/// A set of agents, stored as a bitmask over agent indices (at most 64 agents).
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(pub u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn full(n: usize) -> Coalition {
        if n >= 64 {
            Coalition(u64::MAX)
        } else {
            Coalition((1u64 << n) - 1)
        }
    }

    pub fn single(a: usize) -> Coalition {
        Coalition(1u64 << a)
    }

    pub fn from_agents<I: IntoIterator<Item = usize>>(agents: I) -> Coalition {
        agents.into_iter().fold(Coalition::EMPTY, |c, a| c.with(a))
    }

    pub fn with(self, a: usize) -> Coalition {
        Coalition(self.0 | (1u64 << a))
    }

    pub fn contains(self, a: usize) -> bool {
        self.0 >> a & 1 == 1
    }

    pub fn union(self, o: Coalition) -> Coalition {
        Coalition(self.0 | o.0)
    }

    pub fn inter(self, o: Coalition) -> Coalition {
        Coalition(self.0 & o.0)
    }

    pub fn minus(self, o: Coalition) -> Coalition {
        Coalition(self.0 & !o.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, o: Coalition) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Agents in increasing index order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |a| bits >> a & 1 == 1)
    }

    pub fn least(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Agents and their explicit-move names. Agent and move identities elsewhere
/// are indices into these vectors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub agents: Vec<String>,
    pub moves: Vec<Vec<String>>,
}

impl Signature {
    pub fn new(agents: Vec<String>, moves: Vec<Vec<String>>) -> Signature {
        assert_eq!(agents.len(), moves.len());
        Signature { agents, moves }
    }

    /// Agents `0..n` named by their index, without explicit moves.
    pub fn anonymous(n: usize) -> Signature {
        Signature {
            agents: (0..n).map(|i| i.to_string()).collect(),
            moves: vec![Vec::new(); n],
        }
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn grand(&self) -> Coalition {
        Coalition::full(self.agents.len())
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }

    pub fn move_index(&self, agent: usize, name: &str) -> Option<usize> {
        self.moves[agent].iter().position(|m| m == name)
    }

    pub(crate) fn add_agent(&mut self, name: &str) -> usize {
        match self.agent_index(name) {
            Some(i) => i,
            None => {
                self.agents.push(name.to_string());
                self.moves.push(Vec::new());
                self.agents.len() - 1
            }
        }
    }

    pub(crate) fn add_move(&mut self, agent: usize, name: &str) -> usize {
        match self.move_index(agent, name) {
            Some(i) => i,
            None => {
                self.moves[agent].push(name.to_string());
                self.moves[agent].len() - 1
            }
        }
    }
}

/// A joint explicit move: `(agent, move index)` pairs sorted by agent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointExplicit(pub Vec<(usize, usize)>);

impl JointExplicit {
    pub fn agents(&self) -> Coalition {
        Coalition::from_agents(self.0.iter().map(|&(a, _)| a))
    }

    pub fn get(&self, agent: usize) -> Option<usize> {
        self.0.iter().find(|&&(a, _)| a == agent).map(|&(_, m)| m)
    }

    /// The `=⊓` test: agreement on shared agents.
    pub fn compatible(&self, other: &JointExplicit) -> bool {
        self.0
            .iter()
            .all(|&(a, m)| other.get(a).map_or(true, |m2| m2 == m))
    }

    pub fn restrict(&self, c: Coalition) -> JointExplicit {
        JointExplicit(self.0.iter().copied().filter(|&(a, _)| c.contains(a)).collect())
    }

    pub fn merge(&self, other: &JointExplicit) -> JointExplicit {
        let mut m: BTreeMap<usize, usize> = self.0.iter().copied().collect();
        m.extend(other.0.iter().copied());
        JointExplicit(m.into_iter().collect())
    }
}

/// A disjunctive explicit strategy `O` for the coalition `Ag(O)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Commitment {
    agents: Coalition,
    moves: Vec<JointExplicit>,
}

impl Commitment {
    /// The empty commitment `{()}`.
    pub fn empty() -> Commitment {
        Commitment {
            agents: Coalition::EMPTY,
            moves: vec![JointExplicit::default()],
        }
    }

    pub fn new(agents: Coalition, moves: Vec<JointExplicit>) -> Result<Commitment, FormulaError> {
        let mut moves = moves;
        moves.sort();
        moves.dedup();
        if moves.is_empty() {
            return Err(FormulaError::Semantic("commitment has no joint moves".into()));
        }
        if moves.iter().any(|m| m.agents() != agents) {
            return Err(FormulaError::Semantic(
                "joint moves of a commitment must name the same agents".into(),
            ));
        }
        Ok(Commitment { agents, moves })
    }

    pub fn agents(&self) -> Coalition {
        self.agents
    }

    pub fn moves(&self) -> &[JointExplicit] {
        &self.moves
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modality {
    pub coalition: Coalition,
    pub commitment: Commitment,
}

impl Modality {
    pub fn plain(coalition: Coalition) -> Modality {
        Modality { coalition, commitment: Commitment::empty() }
    }

    pub fn new(coalition: Coalition, commitment: Commitment) -> Modality {
        Modality { coalition, commitment }
    }

    pub fn is_grand(&self, sig: &Signature) -> bool {
        self.coalition.union(self.commitment.agents()) == sig.grand()
    }

    pub fn check(&self, sig: &Signature) -> Result<(), FormulaError> {
        if !self.coalition.inter(self.commitment.agents()).is_empty() {
            return Err(FormulaError::Semantic(
                "coalition and committed agents overlap".into(),
            ));
        }
        if self.is_grand(sig) && self.commitment.moves().len() != 1 {
            return Err(FormulaError::Semantic(
                "grand coalition modality must not be disjunctive".into(),
            ));
        }
        let n = sig.n_agents();
        if !self.coalition.union(self.commitment.agents()).is_subset(Coalition::full(n)) {
            return Err(FormulaError::Semantic("modality names an unknown agent".into()));
        }
        for j in self.commitment.moves() {
            for &(a, m) in &j.0 {
                if m >= sig.moves[a].len() {
                    return Err(FormulaError::Semantic(format!(
                        "unknown move index {m} for agent {}",
                        sig.agents[a]
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bot,
    Atom(String),
    NegAtom(String),
    Var(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Box(Modality, Box<Formula>),
    Diamond(Modality, Box<Formula>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
}

impl Formula {
    pub fn atom(p: &str) -> Formula {
        Formula::Atom(p.to_string())
    }

    pub fn neg_atom(p: &str) -> Formula {
        Formula::NegAtom(p.to_string())
    }

    pub fn var(x: &str) -> Formula {
        Formula::Var(x.to_string())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn boxed(m: Modality, a: Formula) -> Formula {
        Formula::Box(m, Box::new(a))
    }

    pub fn diamond(m: Modality, a: Formula) -> Formula {
        Formula::Diamond(m, Box::new(a))
    }

    pub fn mu(x: &str, a: Formula) -> Formula {
        Formula::Mu(x.to_string(), Box::new(a))
    }

    pub fn nu(x: &str, a: Formula) -> Formula {
        Formula::Nu(x.to_string(), Box::new(a))
    }

    pub fn is_fixpoint(&self) -> bool {
        matches!(self, Formula::Mu(..) | Formula::Nu(..))
    }

    pub fn is_modal(&self) -> bool {
        matches!(self, Formula::Box(..) | Formula::Diamond(..))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Formula::Atom(_) | Formula::NegAtom(_))
    }

    /// Direct subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) | Formula::Or(a, b) => vec![a, b],
            Formula::Box(_, a) | Formula::Diamond(_, a) | Formula::Mu(_, a) | Formula::Nu(_, a) => {
                vec![a]
            }
            _ => Vec::new(),
        }
    }

    /// Number of subformula occurrences.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Var(x) if !bound.contains(x) => {
                    out.insert(x.clone());
                }
                Formula::Mu(x, a) | Formula::Nu(x, a) => {
                    bound.push(x.clone());
                    go(a, bound, out);
                    bound.pop();
                }
                _ => f.children().into_iter().for_each(|c| go(c, bound, out)),
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) | Formula::NegAtom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn modalities(&self) -> Vec<Modality> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Box(m, _) | Formula::Diamond(m, _) = f {
                out.push(m.clone());
            }
        });
        out
    }

    /// Preorder traversal.
    pub fn visit<F: FnMut(&Formula)>(&self, f: &mut F) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Replaces free occurrences of `x` by `by`, stopping at rebinding of `x`.
    /// Capture cannot occur when `by` is closed.
    pub fn subst(&self, x: &str, by: &Formula) -> Formula {
        match self {
            Formula::Var(y) if y == x => by.clone(),
            Formula::Mu(y, _) | Formula::Nu(y, _) if y == x => self.clone(),
            _ => self.map_children(|c| c.subst(x, by)),
        }
    }

    fn map_children<F: FnMut(&Formula) -> Formula>(&self, mut g: F) -> Formula {
        match self {
            Formula::And(a, b) => Formula::and(g(a), g(b)),
            Formula::Or(a, b) => Formula::or(g(a), g(b)),
            Formula::Box(m, a) => Formula::boxed(m.clone(), g(a)),
            Formula::Diamond(m, a) => Formula::diamond(m.clone(), g(a)),
            Formula::Mu(x, a) => Formula::mu(x, g(a)),
            Formula::Nu(x, a) => Formula::nu(x, g(a)),
            other => other.clone(),
        }
    }

    /// One-step unfolding by plain substitution, without renaming binders.
    /// Used internally on closed fixpoint formulas.
    pub fn unfold_raw(&self) -> Result<Formula, FormulaError> {
        match self {
            Formula::Mu(x, a) | Formula::Nu(x, a) => Ok(a.subst(x, self)),
            _ => Err(FormulaError::NotAFixpoint),
        }
    }

    /// Fixpoint unfolding; binders duplicated by the substitution are renamed
    /// so that every binder of the result is unique.
    pub fn unfold(&self) -> Result<Formula, FormulaError> {
        Ok(self.unfold_raw()?.uniquify_binders())
    }

    /// Equivalent formula in which every bound variable occurs under a
    /// modality relative to its binder: an occurrence of `x` reachable from
    /// `ηx` without passing a modality closes a loop at the same state whose
    /// dominant fixpoint is `ηx`, so it becomes `⊥` for `µ` and `⊤` for `ν`.
    pub fn guarded(&self) -> Formula {
        fn replace(f: &Formula, x: &str, by: &Formula) -> Formula {
            match f {
                Formula::Var(y) if y == x => by.clone(),
                Formula::Box(..) | Formula::Diamond(..) => f.clone(),
                Formula::Mu(y, _) | Formula::Nu(y, _) if y == x => f.clone(),
                _ => f.map_children(|c| replace(c, x, by)),
            }
        }
        match self {
            Formula::Mu(x, a) => Formula::mu(x, replace(&a.guarded(), x, &Formula::Bot)),
            Formula::Nu(x, a) => Formula::nu(x, replace(&a.guarded(), x, &Formula::Top)),
            _ => self.map_children(|c| c.guarded()),
        }
    }

    /// Renames repeated binder names (in preorder) to fresh ones.
    pub fn uniquify_binders(&self) -> Formula {
        let mut used: HashSet<String> = HashSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(p) | Formula::NegAtom(p) | Formula::Var(p) => {
                used.insert(p.clone());
            }
            Formula::Mu(x, _) | Formula::Nu(x, _) => {
                used.insert(x.clone());
            }
            _ => {}
        });
        let mut seen = HashSet::new();
        rename_dups(self, &mut seen, &mut used, &mut Vec::new())
    }

    /// Negation normal form of `¬self`. Requires variables to be handled by
    /// the enclosing binders (every `Var` must be bound inside `self`).
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Top => Formula::Bot,
            Formula::Bot => Formula::Top,
            Formula::Atom(p) => Formula::NegAtom(p.clone()),
            Formula::NegAtom(p) => Formula::Atom(p.clone()),
            Formula::Var(x) => Formula::Var(x.clone()),
            Formula::And(a, b) => Formula::or(a.negate(), b.negate()),
            Formula::Or(a, b) => Formula::and(a.negate(), b.negate()),
            Formula::Box(m, a) => Formula::diamond(m.clone(), a.negate()),
            Formula::Diamond(m, a) => Formula::boxed(m.clone(), a.negate()),
            Formula::Mu(x, a) => Formula::nu(x, a.negate()),
            Formula::Nu(x, a) => Formula::mu(x, a.negate()),
        }
    }

    /// Structural equality modulo renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        fn go<'a>(a: &'a Formula, b: &'a Formula, env: &mut Vec<(&'a str, &'a str)>) -> bool {
            match (a, b) {
                (Formula::Var(x), Formula::Var(y)) => {
                    match env.iter().rev().find(|(l, r)| l == x || r == y) {
                        Some((l, r)) => l == x && r == y,
                        None => x == y,
                    }
                }
                (Formula::Mu(x, p), Formula::Mu(y, q)) | (Formula::Nu(x, p), Formula::Nu(y, q)) => {
                    env.push((x, y));
                    let r = go(p, q, env);
                    env.pop();
                    r
                }
                (Formula::And(a1, a2), Formula::And(b1, b2))
                | (Formula::Or(a1, a2), Formula::Or(b1, b2)) => go(a1, b1, env) && go(a2, b2, env),
                (Formula::Box(m, p), Formula::Box(n, q))
                | (Formula::Diamond(m, p), Formula::Diamond(n, q)) => m == n && go(p, q, env),
                _ => a == b,
            }
        }
        go(self, other, &mut Vec::new())
    }

    /// Checks every structural invariant against a signature.
    pub fn validate(&self, sig: &Signature) -> Result<(), FormulaError> {
        if let Some(x) = self.free_vars().into_iter().next() {
            return Err(FormulaError::UnboundVariable(x));
        }
        let mut binders = HashSet::new();
        let mut err = None;
        self.visit(&mut |f| {
            if err.is_some() {
                return;
            }
            match f {
                Formula::Mu(x, _) | Formula::Nu(x, _) => {
                    if !binders.insert(x.clone()) {
                        err = Some(FormulaError::Semantic(format!("binder {x} is not unique")));
                    }
                }
                Formula::Box(m, _) | Formula::Diamond(m, _) => {
                    if let Err(e) = m.check(sig) {
                        err = Some(e);
                    }
                }
                _ => {}
            }
        });
        err.map_or(Ok(()), Err)
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> print::Display<'a> {
        print::Display { f: self, sig }
    }
}

fn fresh(base: &str, used: &mut HashSet<String>) -> String {
    let stem = base.split('_').next().unwrap_or(base);
    let stem = if stem.is_empty() { "x" } else { stem };
    (1..)
        .map(|i| format!("{stem}_{i}"))
        .find(|c| !used.contains(c))
        .map(|c| {
            used.insert(c.clone());
            c
        })
        .unwrap()
}

fn rename_dups(
    f: &Formula,
    seen: &mut HashSet<String>,
    used: &mut HashSet<String>,
    env: &mut Vec<(String, String)>,
) -> Formula {
    match f {
        Formula::Var(x) => match env.iter().rev().find(|(old, _)| old == x) {
            Some((_, new)) => Formula::Var(new.clone()),
            None => f.clone(),
        },
        Formula::Mu(x, a) | Formula::Nu(x, a) => {
            let name = if seen.insert(x.clone()) {
                x.clone()
            } else {
                let n = fresh(x, used);
                seen.insert(n.clone());
                n
            };
            env.push((x.clone(), name.clone()));
            let body = rename_dups(a, seen, used, env);
            env.pop();
            if matches!(f, Formula::Mu(..)) {
                Formula::mu(&name, body)
            } else {
                Formula::nu(&name, body)
            }
        }
        _ => f.map_children(|c| rename_dups(c, seen, used, env)),
    }
}
