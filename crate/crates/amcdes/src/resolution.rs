//! Set-valued resolution.
//!
//! Literals have the form `A(t̄)` where `A` is a subset of a finite carrier
//! and `t̄` is a tuple of terms with one component per agent (the component
//! for agent `i` has sort `i`). A clause is satisfied by an outcome model if
//! for every valuation one of its literals has its outcome in its set.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::error::ResolutionError;
use crate::formula::Signature;
use crate::onestep::{ColoredMoves, ModalAtom, Polarity, Tau};

/// Function and constant symbols generated from modal atoms; the payload is
/// the index of the atom (for Skolem symbols) or of the explicit move.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    /// Skolem constant `e^j` of box atom `j`.
    Box(usize),
    /// Constant for an explicit move of the sort's agent.
    Named(usize),
    /// Skolem function `g^j` of diamond atom `j`.
    Diamond(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u32, usize),
    Const(Sym, usize),
    App(Sym, usize, Vec<Term>),
}

pub type Tuple = Vec<Term>;
pub type Subst = BTreeMap<u32, Term>;

impl Term {
    pub fn sort(&self) -> usize {
        match self {
            Term::Var(_, s) | Term::Const(_, s) | Term::App(_, s, _) => *s,
        }
    }

    fn vars_into(&self, out: &mut Vec<(u32, usize)>) {
        match self {
            Term::Var(v, s) => {
                if !out.iter().any(|(w, _)| w == v) {
                    out.push((*v, *s));
                }
            }
            Term::Const(..) => {}
            Term::App(_, _, args) => args.iter().for_each(|a| a.vars_into(out)),
        }
    }

    pub fn apply(&self, s: &Subst) -> Term {
        match self {
            Term::Var(v, _) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(..) => self.clone(),
            Term::App(f, srt, args) => Term::App(f.clone(), *srt, args.iter().map(|a| a.apply(s)).collect()),
        }
    }

    fn occurs(&self, v: u32) -> bool {
        match self {
            Term::Var(w, _) => *w == v,
            Term::Const(..) => false,
            Term::App(_, _, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    fn map_vars(&self, f: &mut impl FnMut(u32) -> u32) -> Term {
        match self {
            Term::Var(v, s) => Term::Var(f(*v), *s),
            Term::Const(..) => self.clone(),
            Term::App(g, s, args) => Term::App(g.clone(), *s, args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Box(j) => write!(f, "e{j}"),
            Sym::Named(x) => write!(f, "m{x}"),
            Sym::Diamond(j) => write!(f, "g{j}"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v, s) => write!(f, "x{v}_{s}"),
            Term::Const(c, s) => write!(f, "{c}_{s}"),
            Term::App(g, s, args) => {
                write!(f, "{g}_{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn tuple_vars(t: &[Term]) -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    t.iter().for_each(|x| x.vars_into(&mut out));
    out
}

pub fn apply_tuple(t: &[Term], s: &Subst) -> Tuple {
    t.iter().map(|x| x.apply(s)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnifyError {
    Clash,
    Occurs,
}

/// Most general unifier of all given tuples (componentwise), idempotent.
pub fn unify(tuples: &[Tuple]) -> Result<Subst, UnifyError> {
    let mut eqs: Vec<(Term, Term)> = Vec::new();
    if let Some(first) = tuples.first() {
        for t in &tuples[1..] {
            if t.len() != first.len() {
                return Err(UnifyError::Clash);
            }
            eqs.extend(first.iter().cloned().zip(t.iter().cloned()));
        }
    }
    let mut s = Subst::new();
    while let Some((a, b)) = eqs.pop() {
        let (a, b) = (a.apply(&s), b.apply(&s));
        if a == b {
            continue;
        }
        if a.sort() != b.sort() {
            return Err(UnifyError::Clash);
        }
        match (a, b) {
            (Term::Var(v, _), t) | (t, Term::Var(v, _)) => {
                if t.occurs(v) {
                    return Err(UnifyError::Occurs);
                }
                let one = Subst::from([(v, t.clone())]);
                for val in s.values_mut() {
                    *val = val.apply(&one);
                }
                s.insert(v, t);
            }
            (Term::App(f, _, xs), Term::App(g, _, ys)) if f == g && xs.len() == ys.len() => {
                eqs.extend(xs.into_iter().zip(ys));
            }
            _ => return Err(UnifyError::Clash),
        }
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub set: BTreeSet<usize>,
    pub args: Tuple,
}

/// A normalized clause: literals sorted by argument tuple, each tuple at
/// most once.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause(pub Vec<Literal>);

impl Clause {
    pub fn new(lits: Vec<Literal>) -> Clause {
        let mut map: BTreeMap<Tuple, BTreeSet<usize>> = BTreeMap::new();
        for l in lits {
            map.entry(l.args).or_default().extend(l.set);
        }
        Clause(map.into_iter().map(|(args, set)| Literal { set, args }).collect())
    }

    /// All literals have the empty set.
    pub fn is_blatantly_inconsistent(&self) -> bool {
        self.0.iter().all(|l| l.set.is_empty())
    }

    pub fn vars(&self) -> Vec<(u32, usize)> {
        let mut out = Vec::new();
        for l in &self.0 {
            l.args.iter().for_each(|t| t.vars_into(&mut out));
        }
        out
    }

    pub fn apply(&self, s: &Subst) -> Clause {
        Clause::new(self.0.iter().map(|l| Literal { set: l.set.clone(), args: apply_tuple(&l.args, s) }).collect())
    }

    fn map_vars(&self, f: &mut impl FnMut(u32) -> u32) -> Clause {
        Clause(
            self.0
                .iter()
                .map(|l| Literal { set: l.set.clone(), args: l.args.iter().map(|t| t.map_vars(f)).collect() })
                .collect(),
        )
    }

    fn max_var(&self) -> u32 {
        self.vars().iter().map(|(v, _)| *v + 1).max().unwrap_or(0)
    }

    /// Representative modulo variable renaming.
    pub fn canonical(&self) -> Clause {
        let n = self.0.len();
        let orders: Vec<Vec<usize>> = if n <= 5 { permutations(n) } else { vec![(0..n).collect()] };
        orders
            .into_iter()
            .map(|ord| {
                let mut names: BTreeMap<u32, u32> = BTreeMap::new();
                for &i in &ord {
                    for (v, _) in tuple_vars(&self.0[i].args) {
                        let next = names.len() as u32;
                        names.entry(v).or_insert(next);
                    }
                }
                Clause::new(self.map_vars(&mut |v| names[&v]).0)
            })
            .min()
            .unwrap_or_else(|| self.clone())
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn show_set(s: &BTreeSet<usize>) -> String {
    let v: Vec<String> = s.iter().map(|w| w.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|t| t.to_string()).collect();
        write!(f, "{}({})", show_set(&self.set), args.join(","))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]", lits.join(", "))
    }
}

/// Resolution rule variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Several left literals against one right literal, with the mgu.
    SR,
    /// (SR) plus instances under non-most-general unifiers, realized by
    /// additionally instantiating variables of each resolvent with the
    /// constants of matching sort that occur in the clause set.
    LSR,
    /// Several literals on both sides.
    SRPlus,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::SR => "SR",
            Mode::LSR => "lSR",
            Mode::SRPlus => "SR+",
        })
    }
}

fn nonempty_subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n)).map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect()).collect()
}

/// A resolvent together with the selected literals and the unifier used.
#[derive(Clone, Debug)]
pub struct Resolvent {
    pub clause: Clause,
    pub left_lits: Vec<usize>,
    pub right_lits: Vec<usize>,
    pub subst: Subst,
}

/// Resolves on explicitly selected literals; `right` must already be
/// variable-disjoint from `left`. Returns `None` if the tuples do not unify.
pub fn resolve_on(left: &Clause, sel_l: &[usize], right: &Clause, sel_r: &[usize]) -> Option<Resolvent> {
    let tuples: Vec<Tuple> = sel_l
        .iter()
        .map(|&i| left.0[i].args.clone())
        .chain(sel_r.iter().map(|&i| right.0[i].args.clone()))
        .collect();
    let s = unify(&tuples).ok()?;
    let a: BTreeSet<usize> = sel_l.iter().flat_map(|&i| left.0[i].set.iter().copied()).collect();
    let b: BTreeSet<usize> = sel_r.iter().flat_map(|&i| right.0[i].set.iter().copied()).collect();
    let mut lits: Vec<Literal> = Vec::new();
    for (i, l) in left.0.iter().enumerate() {
        if !sel_l.contains(&i) {
            lits.push(Literal { set: l.set.clone(), args: apply_tuple(&l.args, &s) });
        }
    }
    lits.push(Literal { set: a.intersection(&b).copied().collect(), args: apply_tuple(&right.0[sel_r[0]].args, &s) });
    for (i, l) in right.0.iter().enumerate() {
        if !sel_r.contains(&i) {
            lits.push(Literal { set: l.set.clone(), args: apply_tuple(&l.args, &s) });
        }
    }
    Some(Resolvent { clause: Clause::new(lits), left_lits: sel_l.to_vec(), right_lits: sel_r.to_vec(), subst: s })
}

fn rename_apart(left: &Clause, right: &Clause) -> Clause {
    let off = left.max_var();
    right.map_vars(&mut |v| v + off)
}

/// All resolvents of `left` and `right` under the given rule.
pub fn resolvents(left: &Clause, right: &Clause, mode: Mode) -> Vec<Resolvent> {
    let right = rename_apart(left, right);
    let rights: Vec<Vec<usize>> = match mode {
        Mode::SRPlus => nonempty_subsets(right.0.len()),
        _ => (0..right.0.len()).map(|i| vec![i]).collect(),
    };
    let mut out = Vec::new();
    for sl in nonempty_subsets(left.0.len()) {
        for sr in &rights {
            if let Some(r) = resolve_on(left, &sl, &right, sr) {
                out.push(r);
            }
        }
    }
    out
}

/// One resolution step of a derivation.
#[derive(Clone, Debug)]
pub struct Step {
    pub mode: Mode,
    pub left: usize,
    pub left_lits: Vec<usize>,
    pub right: usize,
    pub right_lits: Vec<usize>,
    pub result: usize,
    pub subst: Subst,
}

/// A refutation: the steps leading to a blatantly inconsistent clause.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub clauses: Vec<Clause>,
    pub steps: Vec<Step>,
    pub refuted: usize,
}

impl Derivation {
    /// One step per line: `(SR) <left>[lits] + <right>[lit] => <new> via σ`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let subst: Vec<String> = s.subst.iter().map(|(v, t)| format!("x{v}:={t}")).collect();
            let lits = |c: usize, sel: &[usize]| {
                sel.iter().map(|&i| self.clauses[c].0[i].to_string()).collect::<Vec<_>>().join(", ")
            };
            out.push_str(&format!(
                "({}) {}[{}] + {}[{}] => {} via {{{}}}\n",
                s.mode,
                s.left,
                lits(s.left, &s.left_lits),
                s.right,
                lits(s.right, &s.right_lits),
                s.result,
                subst.join(", ")
            ));
        }
        out.push_str(&format!("refuted: {} {}\n", self.refuted, self.clauses[self.refuted]));
        out
    }
}

#[derive(Clone, Debug)]
pub enum Saturation {
    Consistent(Vec<Clause>),
    Inconsistent(Derivation),
    CapExceeded(usize),
}

impl Saturation {
    pub fn is_consistent(&self) -> Option<bool> {
        match self {
            Saturation::Consistent(_) => Some(true),
            Saturation::Inconsistent(_) => Some(false),
            Saturation::CapExceeded(_) => None,
        }
    }
}

pub const DEFAULT_CAP: usize = 100_000;

fn constants_by_sort(phi: &[Clause]) -> BTreeMap<usize, BTreeSet<Term>> {
    fn walk(t: &Term, out: &mut BTreeMap<usize, BTreeSet<Term>>) {
        match t {
            Term::Var(..) => {}
            Term::Const(_, s) => {
                out.entry(*s).or_default().insert(t.clone());
            }
            Term::App(_, _, args) => args.iter().for_each(|a| walk(a, out)),
        }
    }
    let mut out = BTreeMap::new();
    for c in phi {
        for l in &c.0 {
            l.args.iter().for_each(|t| walk(t, &mut out));
        }
    }
    out
}

fn ground_instances(c: &Clause, consts: &BTreeMap<usize, BTreeSet<Term>>) -> Vec<(Clause, Subst)> {
    let vars = c.vars();
    let mut substs = vec![Subst::new()];
    for (v, s) in vars {
        let opts: Vec<Term> = consts.get(&s).map(|set| set.iter().cloned().collect()).unwrap_or_default();
        let mut next = Vec::new();
        for sub in &substs {
            next.push(sub.clone());
            for t in &opts {
                let mut sub = sub.clone();
                sub.insert(v, t.clone());
                next.push(sub);
            }
        }
        substs = next;
    }
    substs.into_iter().filter(|s| !s.is_empty()).map(|s| (c.apply(&s), s)).collect()
}

/// Saturates `phi` under the rule `mode` with a fair FIFO queue, stopping at
/// the first blatantly inconsistent clause or after `cap` stored clauses.
pub fn saturate(phi: &[Clause], mode: Mode, cap: usize) -> Saturation {
    let consts = constants_by_sort(phi);
    let mut store: Vec<Clause> = Vec::new();
    let mut parent: Vec<Option<Step>> = Vec::new();
    let mut seen: HashSet<Clause> = HashSet::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let derivation = |store: &Vec<Clause>, parent: &Vec<Option<Step>>, refuted: usize| {
        let mut need = BTreeSet::new();
        let mut stack = vec![refuted];
        while let Some(c) = stack.pop() {
            if need.insert(c) {
                if let Some(s) = &parent[c] {
                    stack.push(s.left);
                    stack.push(s.right);
                }
            }
        }
        let steps = need.iter().filter_map(|&c| parent[c].clone()).collect();
        Derivation { clauses: store.clone(), steps, refuted }
    };
    for c in phi {
        let c = Clause::new(c.0.clone());
        if seen.insert(c.canonical()) {
            store.push(c);
            parent.push(None);
            queue.push_back(store.len() - 1);
        }
    }
    if let Some(i) = store.iter().position(|c| c.is_blatantly_inconsistent()) {
        return Saturation::Inconsistent(Derivation { clauses: store, steps: Vec::new(), refuted: i });
    }
    let mut processed: Vec<usize> = Vec::new();
    while let Some(c) = queue.pop_front() {
        processed.push(c);
        for &d in &processed {
            let pairs: &[(usize, usize)] = if c == d { &[(c, c)] } else { &[(c, d), (d, c)] };
            for &(l, r) in pairs {
                let mut fresh: Vec<(Clause, Step)> = Vec::new();
                for res in resolvents(&store[l], &store[r], mode) {
                    let step = Step {
                        mode,
                        left: l,
                        left_lits: res.left_lits.clone(),
                        right: r,
                        right_lits: res.right_lits.clone(),
                        result: 0,
                        subst: res.subst.clone(),
                    };
                    if mode == Mode::LSR {
                        for (inst, extra) in ground_instances(&res.clause, &consts) {
                            let mut st = step.clone();
                            let mut sub: Subst = res.subst.iter().map(|(v, t)| (*v, t.apply(&extra))).collect();
                            sub.extend(extra);
                            st.subst = sub;
                            fresh.push((inst, st));
                        }
                    }
                    fresh.push((res.clause, step));
                }
                for (clause, mut step) in fresh {
                    if !seen.insert(clause.canonical()) {
                        continue;
                    }
                    let id = store.len();
                    step.result = id;
                    let bad = clause.is_blatantly_inconsistent();
                    store.push(clause);
                    parent.push(Some(step));
                    if bad {
                        return Saturation::Inconsistent(derivation(&store, &parent, id));
                    }
                    if store.len() > cap {
                        return Saturation::CapExceeded(cap);
                    }
                    queue.push_back(id);
                }
            }
        }
    }
    Saturation::Consistent(store)
}

/// Translates one-step atoms into clauses: per box `[D,P]a` and `p ∈ P` the
/// singleton `{τ(a)(e_D, x, p)}`, per diamond `<C,R>c` the clause
/// `{τ(c)(x_C, g(x_C), r) | r ∈ R}`.
pub fn clauses_from_atoms(sig: &Signature, xi: &[ModalAtom], tau: &Tau) -> Vec<Clause> {
    let n = sig.n_agents();
    let mut next_var = 0u32;
    let mut fresh = |s: usize| {
        next_var += 1;
        Term::Var(next_var - 1, s)
    };
    let mut out = Vec::new();
    for (j, a) in xi.iter().enumerate() {
        let set = tau.get(&a.var).cloned().unwrap_or_default();
        let c = a.modality.coalition;
        let o = &a.modality.commitment;
        match a.polarity {
            Polarity::Box => {
                for p in o.moves() {
                    let args = (0..n)
                        .map(|i| {
                            if c.contains(i) {
                                Term::Const(Sym::Box(j), i)
                            } else if let Some(x) = p.get(i) {
                                Term::Const(Sym::Named(x), i)
                            } else {
                                fresh(i)
                            }
                        })
                        .collect();
                    out.push(Clause::new(vec![Literal { set: set.clone(), args }]));
                }
            }
            Polarity::Diamond => {
                let xs: Vec<Term> = c.iter().map(&mut fresh).collect();
                let lits = o
                    .moves()
                    .iter()
                    .map(|r| {
                        let args = (0..n)
                            .map(|i| {
                                if c.contains(i) {
                                    xs[c.iter().position(|k| k == i).unwrap()].clone()
                                } else if let Some(x) = r.get(i) {
                                    Term::Const(Sym::Named(x), i)
                                } else {
                                    Term::App(Sym::Diamond(j), i, xs.clone())
                                }
                            })
                            .collect();
                        Literal { set: set.clone(), args }
                    })
                    .collect();
                out.push(Clause::new(lits));
            }
        }
    }
    out
}

/// A ground clause of set-valued propositional logic: index `y` to set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropClause(pub BTreeMap<usize, BTreeSet<usize>>);

impl PropClause {
    pub fn new(lits: &[(usize, &[usize])]) -> PropClause {
        let mut m: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (y, set) in lits {
            m.entry(*y).or_default().extend(set.iter().copied());
        }
        PropClause(m)
    }

    pub fn is_blatantly_inconsistent(&self) -> bool {
        self.0.values().all(|s| s.is_empty())
    }

    pub fn satisfied_by(&self, f: &[usize]) -> bool {
        self.0.iter().any(|(y, s)| s.contains(&f[*y]))
    }
}

#[derive(Clone, Debug)]
pub enum PropSaturation {
    Consistent(Vec<PropClause>),
    Inconsistent,
    CapExceeded(usize),
}

fn prop_resolvents(a: &PropClause, b: &PropClause) -> Vec<PropClause> {
    let mut out = Vec::new();
    for (y, sa) in &a.0 {
        let Some(sb) = b.0.get(y) else { continue };
        let mut m: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (z, s) in a.0.iter().chain(&b.0) {
            if z != y {
                m.entry(*z).or_default().extend(s.iter().copied());
            }
        }
        m.insert(*y, sa.intersection(sb).copied().collect());
        out.push(PropClause(m));
    }
    out
}

/// Closure under ground set-valued resolution.
pub fn prop_saturate(phi: &[PropClause], cap: usize) -> PropSaturation {
    let mut store: Vec<PropClause> = Vec::new();
    let mut seen = HashSet::new();
    for c in phi {
        if seen.insert(c.clone()) {
            store.push(c.clone());
        }
    }
    if store.iter().any(|c| c.is_blatantly_inconsistent()) {
        return PropSaturation::Inconsistent;
    }
    let mut i = 0;
    while i < store.len() {
        for j in 0..=i {
            for r in prop_resolvents(&store[i], &store[j]) {
                if seen.insert(r.clone()) {
                    if r.is_blatantly_inconsistent() {
                        return PropSaturation::Inconsistent;
                    }
                    store.push(r);
                    if store.len() > cap {
                        return PropSaturation::CapExceeded(cap);
                    }
                }
            }
        }
        i += 1;
    }
    PropSaturation::Consistent(store)
}

/// Reads a model `f: Y → W` off a saturated consistent clause set by
/// greedily adding unit clauses `{w}(y)` in lexicographic order of `(y, w)`
/// while consistency is preserved.
pub fn prop_extract_model(phi: &[PropClause], ys: usize, w: usize) -> Result<Vec<usize>, ResolutionError> {
    match prop_saturate(phi, DEFAULT_CAP) {
        PropSaturation::Inconsistent => return Err(ResolutionError::Inconsistent),
        PropSaturation::CapExceeded(c) => return Err(ResolutionError::CapExceeded(c)),
        PropSaturation::Consistent(all) => {
            let have: HashSet<&PropClause> = phi.iter().collect();
            if all.iter().any(|c| !have.contains(c)) {
                return Err(ResolutionError::NotSaturated);
            }
        }
    }
    let mut set: Vec<PropClause> = phi.to_vec();
    let mut f = Vec::new();
    for y in 0..ys {
        let mut chosen = None;
        for v in 0..w {
            let mut trial = set.clone();
            trial.push(PropClause::new(&[(y, &[v])]));
            match prop_saturate(&trial, DEFAULT_CAP) {
                PropSaturation::Consistent(closed) => {
                    set = closed;
                    chosen = Some(v);
                    break;
                }
                PropSaturation::Inconsistent => {}
                PropSaturation::CapExceeded(c) => return Err(ResolutionError::CapExceeded(c)),
            }
        }
        f.push(chosen.ok_or(ResolutionError::Inconsistent)?);
    }
    if phi.iter().any(|c| !c.satisfied_by(&f)) {
        return Err(ResolutionError::Inconsistent);
    }
    Ok(f)
}

fn canonical_tuple(t: &[Term]) -> Tuple {
    let mut names: BTreeMap<u32, u32> = BTreeMap::new();
    for (v, _) in tuple_vars(t) {
        let next = names.len() as u32;
        names.entry(v).or_insert(next);
    }
    t.iter().map(|x| x.map_vars(&mut |v| names[&v])).collect()
}

fn shift_tuple(t: &[Term], off: u32) -> Tuple {
    t.iter().map(|x| x.map_vars(&mut |v| v + off)).collect()
}

/// The argument tuples of a clause set.
pub fn tuples_of(phi: &[Clause]) -> Vec<Tuple> {
    let mut out = BTreeSet::new();
    for c in phi {
        for l in &c.0 {
            out.insert(canonical_tuple(&l.args));
        }
    }
    out.into_iter().collect()
}

/// Closes a set of tuples under unification: for tuples `t`, `s` (renamed
/// apart) with mgu `σ`, adds `tσ`. Tuples are kept modulo renaming.
pub fn unification_closure(seed: &[Tuple], cap: usize) -> Result<Vec<Tuple>, ResolutionError> {
    let mut ct: Vec<Tuple> = Vec::new();
    let mut seen = HashSet::new();
    for t in seed {
        let c = canonical_tuple(t);
        if seen.insert(c.clone()) {
            ct.push(c);
        }
    }
    let mut i = 0;
    while i < ct.len() {
        for j in 0..=i {
            let t = ct[i].clone();
            let off = tuple_vars(&t).iter().map(|(v, _)| v + 1).max().unwrap_or(0);
            let s = shift_tuple(&ct[j], off);
            if let Ok(sigma) = unify(&[t.clone(), s]) {
                let c = canonical_tuple(&apply_tuple(&t, &sigma));
                if seen.insert(c.clone()) {
                    ct.push(c);
                    if ct.len() > cap {
                        return Err(ResolutionError::CapExceeded(cap));
                    }
                }
            }
        }
        i += 1;
    }
    Ok(ct)
}

/// Interpretation of the term language over finite move sets.
pub trait TermModel {
    /// Number of moves of the agent `sort`.
    fn moves(&self, sort: usize) -> usize;
    fn constant(&self, sym: &Sym, sort: usize) -> usize;
    /// `args` are the values of the argument terms, paired with their sorts.
    fn apply(&self, sym: &Sym, sort: usize, args: &[(usize, usize)]) -> usize;
}

pub fn eval_term(t: &Term, m: &dyn TermModel, eta: &BTreeMap<u32, usize>) -> usize {
    match t {
        Term::Var(v, _) => eta[v],
        Term::Const(c, s) => m.constant(c, *s),
        Term::App(g, s, args) => {
            let vals: Vec<(usize, usize)> = args.iter().map(|a| (a.sort(), eval_term(a, m, eta))).collect();
            m.apply(g, *s, &vals)
        }
    }
}

fn valuations(vars: &[(u32, usize)], m: &dyn TermModel) -> Vec<BTreeMap<u32, usize>> {
    let mut out = vec![BTreeMap::new()];
    for &(v, s) in vars {
        out = out
            .into_iter()
            .flat_map(|e| {
                (0..m.moves(s)).map(move |i| {
                    let mut e = e.clone();
                    e.insert(v, i);
                    e
                })
            })
            .collect();
    }
    out
}

/// Checks that every solvable equation `t = s` over `ct` is unifiable and
/// that each solution factors through the mgu. Returns a description of the
/// first violation.
pub fn check_equationally_complete(m: &dyn TermModel, ct: &[Tuple]) -> Result<(), String> {
    for (i, t) in ct.iter().enumerate() {
        let off = tuple_vars(t).iter().map(|(v, _)| v + 1).max().unwrap_or(0);
        for s0 in &ct[i..] {
            let s = shift_tuple(s0, off);
            let (tv, sv) = (tuple_vars(t), tuple_vars(&s));
            let mut by_value: BTreeMap<Vec<usize>, Vec<BTreeMap<u32, usize>>> = BTreeMap::new();
            for eta in valuations(&tv, m) {
                let val: Vec<usize> = t.iter().map(|x| eval_term(x, m, &eta)).collect();
                by_value.entry(val).or_default().push(eta);
            }
            let mgu = unify(&[t.clone(), s.clone()]);
            for eta_s in valuations(&sv, m) {
                let val: Vec<usize> = s.iter().map(|x| eval_term(x, m, &eta_s)).collect();
                let Some(etas) = by_value.get(&val) else { continue };
                let show = || {
                    let a: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                    let b: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                    format!("({}) = ({})", a.join(","), b.join(","))
                };
                let sigma = match &mgu {
                    Ok(sigma) => sigma,
                    Err(e) => return Err(format!("{} is solvable but not unifiable ({e:?})", show())),
                };
                for eta_t in etas {
                    let eta: BTreeMap<u32, usize> = eta_t.iter().chain(&eta_s).map(|(k, v)| (*k, *v)).collect();
                    let rest: BTreeMap<u32, usize> =
                        eta.iter().filter(|(v, _)| !sigma.contains_key(v)).map(|(k, v)| (*k, *v)).collect();
                    for (x, term) in sigma {
                        if eval_term(term, m, &rest) != eta[x] {
                            return Err(format!("a solution of {} does not factor through the mgu", show()));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// The colored-moves interpretation of the symbols generated from `Ξ`.
pub struct ColoredTermModel {
    cm: ColoredMoves,
    /// Per diamond atom: its position `j` among the diamonds and the agents
    /// outside `C ∪ H`.
    diamonds: BTreeMap<usize, (usize, Vec<usize>)>,
    named: BTreeMap<(usize, usize), usize>,
    zero_colors: bool,
}

impl ColoredTermModel {
    pub fn new(sig: &Signature, xi: &[ModalAtom]) -> ColoredTermModel {
        let cm = ColoredMoves::new(sig, xi);
        let n = sig.n_agents();
        let diamonds = cm
            .diamond_base
            .keys()
            .enumerate()
            .map(|(j, &i)| {
                let bound = xi[i].modality.coalition.union(xi[i].modality.commitment.agents());
                (i, (j, (0..n).filter(|&a| !bound.contains(a)).collect()))
            })
            .collect();
        let named = cm.named.clone();
        ColoredTermModel { cm, diamonds, named, zero_colors: false }
    }

    /// The mutant in which every move has color 0 and Skolem functions
    /// ignore colors.
    pub fn with_zero_colors(mut self) -> ColoredTermModel {
        self.zero_colors = true;
        self
    }
}

impl TermModel for ColoredTermModel {
    fn moves(&self, _sort: usize) -> usize {
        self.cm.len()
    }

    fn constant(&self, sym: &Sym, sort: usize) -> usize {
        match sym {
            Sym::Box(j) => self.cm.box_move[j],
            Sym::Named(x) => self.named[&(sort, *x)],
            Sym::Diamond(j) => self.cm.diamond_base[j],
        }
    }

    fn apply(&self, sym: &Sym, sort: usize, args: &[(usize, usize)]) -> usize {
        let Sym::Diamond(d) = sym else {
            return self.constant(sym, sort);
        };
        let (j, rest) = &self.diamonds[d];
        if self.zero_colors {
            return self.cm.diamond_base[d];
        }
        let col: usize = args.iter().map(|&(_, v)| self.cm.color[v]).sum();
        let g = self.cm.skolem(*d, *j, rest, col);
        g.iter().find(|(a, _)| *a == sort).map(|(_, v)| *v).unwrap_or(self.cm.diamond_base[d])
    }
}
