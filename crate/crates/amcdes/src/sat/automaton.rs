//! Nondeterministic parity automata and their determinization.
//!
//! A parity automaton accepts a run iff the largest priority visited
//! infinitely often is even. Determinization goes through a Büchi automaton
//! that guesses the dominating even priority and then applies Piterman's
//! variant of Safra's construction (compact names, parity output).

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

/// A parity automaton with state-based priorities; runs die on letters
/// without successors.
pub trait Automaton {
    type Letter;
    fn n_states(&self) -> usize;
    fn initial(&self) -> Vec<usize>;
    fn priority(&self, q: usize) -> u32;
    fn successors(&self, q: usize, a: &Self::Letter) -> Vec<usize>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetExceeded(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct SNode {
    name: u32,
    label: Vec<u32>,
    children: Vec<SNode>,
}

impl SNode {
    fn names(&self, out: &mut Vec<u32>) {
        out.push(self.name);
        self.children.iter().for_each(|c| c.names(out));
    }

    fn rename(&mut self, map: &HashMap<u32, u32>) {
        self.name = map[&self.name];
        self.children.iter_mut().for_each(|c| c.rename(map));
    }
}

/// On-the-fly deterministic parity automaton for an [`Automaton`], with
/// transition priorities under the max-even convention.
pub struct Determinizer<A: Automaton> {
    pub a: A,
    evens: Vec<u32>,
    bound: u32,
    states: Vec<Option<SNode>>,
    index: HashMap<Option<SNode>, usize>,
    limit: usize,
}

impl<A: Automaton> Determinizer<A> {
    pub fn new(a: A, limit: usize) -> Determinizer<A> {
        let evens: BTreeSet<u32> = (0..a.n_states()).map(|q| a.priority(q)).filter(|p| p % 2 == 0).collect();
        let evens: Vec<u32> = evens.into_iter().collect();
        let bound = (a.n_states() * (1 + evens.len())) as u32;
        let mut d = Determinizer { a, evens, bound, states: Vec::new(), index: HashMap::new(), limit };
        let init = d.nba_initial();
        let root = (!init.is_empty()).then(|| SNode { name: 1, label: init, children: Vec::new() });
        d.intern(root).expect("first state fits any budget");
        d
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Largest priority that [`Self::step`] can return.
    pub fn max_priority(&self) -> u32 {
        2 * self.bound + 1
    }

    fn modes(&self) -> usize {
        1 + self.evens.len()
    }

    fn nba_initial(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for q in self.a.initial() {
            self.nba_enter(q, 0, &mut out);
        }
        out.sort();
        out.dedup();
        out
    }

    /// NBA states for entering automaton state `q` from mode `mode`: mode 0
    /// tracks without commitment; mode `i > 0` has committed to the even
    /// priority `evens[i - 1]` as the largest one seen from now on.
    fn nba_enter(&self, q: usize, mode: usize, out: &mut Vec<u32>) {
        let p = self.a.priority(q);
        let m = self.modes();
        if mode == 0 {
            out.push((q * m) as u32);
            for (i, &e) in self.evens.iter().enumerate() {
                if p <= e {
                    out.push((q * m + i + 1) as u32);
                }
            }
        } else if p <= self.evens[mode - 1] {
            out.push((q * m + mode) as u32);
        }
    }

    fn nba_accepting(&self, s: u32) -> bool {
        let m = self.modes();
        let (q, mode) = (s as usize / m, s as usize % m);
        mode > 0 && self.a.priority(q) == self.evens[mode - 1]
    }

    fn nba_step(&self, label: &[u32], a: &A::Letter, cache: &mut HashMap<usize, Vec<usize>>) -> Vec<u32> {
        let m = self.modes();
        let mut out = Vec::new();
        for &s in label {
            let (q, mode) = (s as usize / m, s as usize % m);
            let succ = cache.entry(q).or_insert_with(|| self.a.successors(q, a));
            for &q2 in succ.iter() {
                self.nba_enter(q2, mode, &mut out);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn intern(&mut self, t: Option<SNode>) -> Result<usize, BudgetExceeded> {
        if let Some(&i) = self.index.get(&t) {
            return Ok(i);
        }
        if self.states.len() >= self.limit {
            return Err(BudgetExceeded(self.limit));
        }
        self.states.push(t.clone());
        self.index.insert(t, self.states.len() - 1);
        Ok(self.states.len() - 1)
    }

    /// Successor state and transition priority.
    pub fn step(&mut self, d: usize, a: &A::Letter) -> Result<(usize, u32), BudgetExceeded> {
        let neutral = 1;
        let Some(mut root) = self.states[d].clone() else {
            return Ok((d, neutral));
        };
        let mut names = Vec::new();
        root.names(&mut names);
        let old = names.len() as u32;
        let mut fresh = old + 1;
        self.spawn(&mut root, &mut fresh);
        let mut cache = HashMap::new();
        self.transition(&mut root, a, &mut cache);
        horizontal(&mut root, &HashSet::new());
        let mut removed = Vec::new();
        let mut green = Vec::new();
        let tree = if root.label.is_empty() {
            root.names(&mut removed);
            None
        } else {
            prune(&mut root, &mut removed);
            vertical(&mut root, &mut removed, &mut green);
            let mut names = Vec::new();
            root.names(&mut names);
            names.sort();
            let map: HashMap<u32, u32> = names.iter().enumerate().map(|(i, &n)| (n, i as u32 + 1)).collect();
            root.rename(&map);
            Some(root)
        };
        let f = removed.into_iter().filter(|&n| n <= old).min();
        let e = green.into_iter().min();
        // Min-parity priority with even = accepting, mirrored into max-even.
        let p = match (e, f) {
            (Some(e), f) if f.map_or(true, |f| e < f) => 2 * e,
            (_, Some(f)) => 2 * f - 1,
            _ => 2 * self.bound + 1,
        };
        let out = 2 * self.bound + 2 - p;
        Ok((self.intern(tree)?, out))
    }

    fn spawn(&self, v: &mut SNode, fresh: &mut u32) {
        for c in v.children.iter_mut() {
            self.spawn(c, fresh);
        }
        let acc: Vec<u32> = v.label.iter().copied().filter(|&s| self.nba_accepting(s)).collect();
        if !acc.is_empty() {
            v.children.push(SNode { name: *fresh, label: acc, children: Vec::new() });
            *fresh += 1;
        }
    }

    fn transition(&self, v: &mut SNode, a: &A::Letter, cache: &mut HashMap<usize, Vec<usize>>) {
        v.label = self.nba_step(&v.label, a, cache);
        for c in v.children.iter_mut() {
            self.transition(c, a, cache);
        }
    }
}

/// Removes from each node the states owned by an older sibling of it or of
/// one of its ancestors.
fn horizontal(v: &mut SNode, claimed: &HashSet<u32>) {
    v.label.retain(|s| !claimed.contains(s));
    let mut local = claimed.clone();
    for c in v.children.iter_mut() {
        horizontal(c, &local);
        local.extend(c.label.iter().copied());
    }
}

fn prune(v: &mut SNode, removed: &mut Vec<u32>) {
    v.children.retain(|c| {
        if c.label.is_empty() {
            c.names(removed);
            false
        } else {
            true
        }
    });
    for c in v.children.iter_mut() {
        prune(c, removed);
    }
}

fn vertical(v: &mut SNode, removed: &mut Vec<u32>, green: &mut Vec<u32>) {
    if v.children.is_empty() {
        return;
    }
    let union: BTreeSet<u32> = v.children.iter().flat_map(|c| c.label.iter().copied()).collect();
    if union.len() == v.label.len() {
        for c in &v.children {
            c.names(removed);
        }
        v.children.clear();
        green.push(v.name);
    } else {
        for c in v.children.iter_mut() {
            vertical(c, removed, green);
        }
    }
}

/// A parity automaton over the alphabet `0..alphabet` given by tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitNpa {
    pub initial: Vec<usize>,
    pub priority: Vec<u32>,
    /// `delta[q][a]`: successors of `q` on letter `a`.
    pub delta: Vec<Vec<Vec<usize>>>,
}

/// A deterministic automaton with transition priorities (max-even).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitDpa {
    pub initial: usize,
    pub delta: Vec<Vec<Option<(usize, u32)>>>,
}

impl Automaton for &ExplicitNpa {
    type Letter = usize;

    fn n_states(&self) -> usize {
        self.priority.len()
    }

    fn initial(&self) -> Vec<usize> {
        self.initial.clone()
    }

    fn priority(&self, q: usize) -> u32 {
        self.priority[q]
    }

    fn successors(&self, q: usize, a: &usize) -> Vec<usize> {
        self.delta[q][*a].clone()
    }
}

impl ExplicitNpa {
    pub fn alphabet(&self) -> usize {
        self.delta.first().map_or(0, |d| d.len())
    }

    pub fn is_deterministic(&self) -> bool {
        self.initial.len() == 1 && self.delta.iter().all(|row| row.iter().all(|s| s.len() <= 1))
    }

    /// Does some run on `stem · cycle^ω` satisfy the parity condition?
    pub fn accepts_lasso(&self, stem: &[usize], cycle: &[usize]) -> bool {
        assert!(!cycle.is_empty());
        let len = stem.len() + cycle.len();
        let letter = |i: usize| if i < stem.len() { stem[i] } else { cycle[i - stem.len()] };
        let next = |i: usize| if i + 1 < len { i + 1 } else { stem.len() };
        let n = self.priority.len();
        let id = |i: usize, q: usize| i * n + q;
        let succ = |v: usize| -> Vec<usize> {
            let (i, q) = (v / n, v % n);
            self.delta[q][letter(i)].iter().map(|&q2| id(next(i), q2)).collect()
        };
        let mut reach = vec![false; len * n];
        let mut queue: VecDeque<usize> = self.initial.iter().map(|&q| id(0, q)).collect();
        for &v in &queue {
            reach[v] = true;
        }
        while let Some(v) = queue.pop_front() {
            for w in succ(v) {
                if !reach[w] {
                    reach[w] = true;
                    queue.push_back(w);
                }
            }
        }
        // An accepting lasso through v: v returns to itself via states of
        // priority at most that of v, which is even.
        (0..len * n).filter(|&v| reach[v] && self.priority[v % n] % 2 == 0).any(|v| {
            let p = self.priority[v % n];
            let mut seen = vec![false; len * n];
            let mut stack = succ(v);
            while let Some(w) = stack.pop() {
                if w == v {
                    return true;
                }
                if seen[w] || self.priority[w % n] > p {
                    continue;
                }
                seen[w] = true;
                stack.extend(succ(w));
            }
            false
        })
    }
}

impl ExplicitDpa {
    pub fn accepts_lasso(&self, stem: &[usize], cycle: &[usize]) -> bool {
        let mut d = self.initial;
        for &a in stem {
            match self.delta[d][a] {
                Some((d2, _)) => d = d2,
                None => return false,
            }
        }
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut prios = Vec::new();
        let mut i = 0;
        loop {
            let key = (i % cycle.len(), d);
            if let Some(&start) = seen.get(&key) {
                return prios[start..].iter().max().map_or(false, |p| p % 2 == 0);
            }
            seen.insert(key, prios.len());
            match self.delta[d][cycle[i % cycle.len()]] {
                Some((d2, p)) => {
                    prios.push(p);
                    d = d2;
                }
                None => return false,
            }
            i += 1;
        }
    }
}

/// Language-equivalent deterministic parity automaton. Deterministic inputs
/// are returned as they are, with state priorities moved onto the incoming
/// transitions.
pub fn determinize(a: &ExplicitNpa, limit: usize) -> Result<ExplicitDpa, BudgetExceeded> {
    let sigma = a.alphabet();
    if a.is_deterministic() {
        let delta = a
            .delta
            .iter()
            .map(|row| row.iter().map(|s| s.first().map(|&q| (q, a.priority[q]))).collect())
            .collect();
        return Ok(ExplicitDpa { initial: a.initial[0], delta });
    }
    let mut det = Determinizer::new(a, limit);
    let mut delta: Vec<Vec<Option<(usize, u32)>>> = Vec::new();
    let mut d = 0;
    while d < det.len() {
        let row = (0..sigma).map(|l| det.step(d, &l).map(Some)).collect::<Result<Vec<_>, _>>()?;
        delta.push(row);
        d += 1;
    }
    Ok(ExplicitDpa { initial: det.initial(), delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinitely_many_b() {
        // Guess the last a, then see only b: accepts (a|b)* b^ω.
        let a = ExplicitNpa {
            initial: vec![0],
            priority: vec![1, 2],
            delta: vec![vec![vec![0], vec![0, 1]], vec![vec![], vec![1]]],
        };
        let d = determinize(&a, 1000).unwrap();
        for (stem, cycle, want) in [(vec![], vec![1], true), (vec![1], vec![0, 1], false), (vec![0, 0], vec![1, 1], true)] {
            assert_eq!(a.accepts_lasso(&stem, &cycle), want);
            assert_eq!(d.accepts_lasso(&stem, &cycle), want);
        }
    }

    #[test]
    fn deterministic_input_is_kept() {
        let a = ExplicitNpa { initial: vec![0], priority: vec![0, 1], delta: vec![vec![vec![1]], vec![vec![0]]] };
        let d = determinize(&a, 10).unwrap();
        assert_eq!(d.delta, vec![vec![Some((1, 1))], vec![Some((0, 0))]]);
    }
}
