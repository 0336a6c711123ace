//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use amcdes::onestep::{ColoredMoves, ModalAtom, OneStepProblem, Polarity, Tau};
use amcdes::resolution::PropClause;
use amcdes::{Cgses, Coalition, Commitment, Formula, JointExplicit, Modality, Owner, ParityGame, Signature};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Agents `A0..`, each with named moves `x0..`.
pub fn signature(agents: usize, named: usize) -> Signature {
    Signature::new(
        (0..agents).map(|i| format!("A{i}")).collect(),
        (0..agents).map(|_| (0..named).map(|j| format!("x{j}")).collect()).collect(),
    )
}

pub fn random_modality<R: Rng>(r: &mut R, sig: &Signature) -> Modality {
    let n = sig.n_agents();
    let mut c = Coalition::EMPTY;
    let mut h = Coalition::EMPTY;
    for a in 0..n {
        match r.gen_range(0..3) {
            0 => c = c.with(a),
            1 if !sig.moves[a].is_empty() => h = h.with(a),
            _ => {}
        }
    }
    if h.is_empty() {
        return Modality::plain(c);
    }
    let grand = c.union(h) == sig.grand();
    let count = if grand { 1 } else { r.gen_range(1..=2) };
    let moves = (0..count)
        .map(|_| JointExplicit(h.iter().map(|a| (a, r.gen_range(0..sig.moves[a].len()))).collect()))
        .collect();
    Modality::new(c, Commitment::new(h, moves).unwrap())
}

/// Every modality over `sig`: all splits into acting, committed and idle
/// agents, and every nonempty commitment (singletons for grand ones).
pub fn all_modalities(sig: &Signature) -> Vec<Modality> {
    let n = sig.n_agents();
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let (mut c, mut h) = (Coalition::EMPTY, Coalition::EMPTY);
        let mut x = code;
        for a in 0..n {
            match x % 3 {
                0 => c = c.with(a),
                1 => h = h.with(a),
                _ => {}
            }
            x /= 3;
        }
        if h.is_empty() {
            out.push(Modality::plain(c));
            continue;
        }
        let agents: Vec<usize> = h.iter().collect();
        let mut joints = vec![Vec::new()];
        for &a in &agents {
            joints = joints
                .into_iter()
                .flat_map(|j: Vec<(usize, usize)>| {
                    (0..sig.moves[a].len()).map(move |m| {
                        let mut j = j.clone();
                        j.push((a, m));
                        j
                    })
                })
                .collect();
        }
        let grand = c.union(h) == sig.grand();
        for mask in 1u32..(1 << joints.len()) {
            if grand && mask.count_ones() != 1 {
                continue;
            }
            let moves = (0..joints.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| JointExplicit(joints[i].clone()))
                .collect();
            out.push(Modality::new(c, Commitment::new(h, moves).unwrap()));
        }
    }
    out
}

pub fn random_problem<R: Rng>(r: &mut R, agents: usize, named: usize, carrier: usize, max_atoms: usize) -> OneStepProblem {
    let sig = signature(agents, named);
    let n = r.gen_range(1..=max_atoms);
    let atoms: Vec<ModalAtom> = (0..n)
        .map(|i| {
            let pol = if r.gen_bool(0.5) { Polarity::Box } else { Polarity::Diamond };
            ModalAtom::new(pol, random_modality(r, &sig), &format!("v{i}"))
        })
        .collect();
    let tau = atoms
        .iter()
        .map(|a| (a.var.clone(), (0..carrier).filter(|_| r.gen_bool(0.6)).collect()))
        .collect();
    OneStepProblem::new(sig, atoms, tau, carrier).unwrap()
}

/// Random problems that the rules declare satisfiable.
pub fn random_sat_problems(seed: u64, count: usize) -> Vec<OneStepProblem> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let agents = r.gen_range(1..=3);
        let carrier = r.gen_range(1..=3);
        let p = random_problem(&mut r, agents, 2, carrier, 4);
        if amcdes::onestep::one_step_sat(&p) {
            out.push(p);
        }
    }
    out
}

/// The exhaustive family: two agents with one named move each, up to three
/// atoms (a multiset over all 18 modal atoms, with distinct variables),
/// carrier of size 1 or 2, and every valuation.
pub fn exhaustive_family() -> Vec<OneStepProblem> {
    let sig = signature(2, 1);
    let mut kinds = Vec::new();
    for m in all_modalities(&sig) {
        kinds.push((Polarity::Box, m.clone()));
        kinds.push((Polarity::Diamond, m));
    }
    let mut multisets: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..3 {
        let mut next = Vec::new();
        for ms in &frontier {
            let from = ms.last().copied().unwrap_or(0);
            for k in from..kinds.len() {
                let mut ms = ms.clone();
                ms.push(k);
                next.push(ms);
            }
        }
        multisets.extend(next.iter().cloned());
        frontier = next;
    }
    let mut out = Vec::new();
    for carrier in 1..=2usize {
        let subsets: Vec<BTreeSet<usize>> =
            (0..1u32 << carrier).map(|m| (0..carrier).filter(|w| m & (1 << w) != 0).collect()).collect();
        for ms in multisets.iter().filter(|ms| !ms.is_empty()) {
            let atoms: Vec<ModalAtom> = ms
                .iter()
                .enumerate()
                .map(|(i, &k)| ModalAtom::new(kinds[k].0, kinds[k].1.clone(), &format!("v{i}")))
                .collect();
            let combos = subsets.len().pow(atoms.len() as u32);
            for code in 0..combos {
                let mut x = code;
                let mut tau = Tau::new();
                for a in &atoms {
                    tau.insert(a.var.clone(), subsets[x % subsets.len()].clone());
                    x /= subsets.len();
                }
                out.push(OneStepProblem::new(sig.clone(), atoms.clone(), tau, carrier).unwrap());
            }
        }
    }
    out
}

/// Brute-force one-step satisfiability over games in which every agent has
/// `k` moves (the colored-moves count for the problem) and every named move
/// denotes move 0. Box witnesses are enumerated up to renaming of the
/// unnamed moves; the remaining diamond constraints are solved by
/// backtracking over outcome cells.
pub fn brute_force_one_step(p: &OneStepProblem) -> bool {
    let n = p.sig.n_agents();
    assert!(p.sig.moves.iter().all(|m| m.len() <= 1), "oracle assumes at most one named move per agent");
    let k = ColoredMoves::new(&p.sig, &p.atoms).len();
    let cells: Vec<Vec<usize>> = product(&vec![k; n]);
    let full: u32 = (1 << p.carrier) - 1;
    let mask_of = |a: &ModalAtom| -> u32 { p.tau.get(&a.var).map_or(0, |s| s.iter().map(|w| 1 << w).sum()) };
    // Cells reachable under the commitment (all named moves are move 0).
    let committed_ok = |m: &Modality, cell: &[usize]| m.commitment.agents().iter().all(|a| cell[a] == 0);
    let boxes: Vec<&ModalAtom> = p.atoms.iter().filter(|a| a.polarity == Polarity::Box).collect();
    let diamonds: Vec<&ModalAtom> = p.atoms.iter().filter(|a| a.polarity == Polarity::Diamond).collect();

    // Diamond clauses depend only on the cell domains.
    let mut clauses: Vec<(Vec<usize>, u32)> = Vec::new();
    for d in &diamonds {
        let c: Vec<usize> = d.modality.coalition.iter().collect();
        for mc in product(&vec![k; c.len()]) {
            let viable: Vec<usize> = cells
                .iter()
                .enumerate()
                .filter(|(_, cell)| c.iter().zip(&mc).all(|(&a, &v)| cell[a] == v) && committed_ok(&d.modality, cell))
                .map(|(i, _)| i)
                .collect();
            clauses.push((viable, mask_of(d)));
        }
    }

    // Enumerate box witnesses: per agent, each new witness move is either a
    // move already used or the next unused one (0 is reserved for the name).
    fn witnesses(
        boxes: &[&ModalAtom],
        i: usize,
        used: &mut Vec<usize>,
        k: usize,
        chosen: &mut Vec<Vec<(usize, usize)>>,
        f: &mut dyn FnMut(&[Vec<(usize, usize)>]) -> bool,
    ) -> bool {
        if i == boxes.len() {
            return f(chosen);
        }
        let agents: Vec<usize> = boxes[i].modality.coalition.iter().collect();
        fn rec(
            agents: &[usize],
            j: usize,
            used: &mut Vec<usize>,
            k: usize,
            cur: &mut Vec<(usize, usize)>,
            next: &mut dyn FnMut(&mut Vec<usize>, &[(usize, usize)]) -> bool,
        ) -> bool {
            if j == agents.len() {
                return next(used, cur);
            }
            let a = agents[j];
            let limit = (used[a] + 1).min(k);
            for v in 0..limit {
                let before = used[a];
                used[a] = used[a].max(v + 1);
                cur.push((a, v));
                let ok = rec(agents, j + 1, used, k, cur, next);
                cur.pop();
                used[a] = before;
                if ok {
                    return true;
                }
            }
            false
        }
        let mut cur = Vec::new();
        rec(&agents, 0, used, k, &mut cur, &mut |used, cur| {
            chosen.push(cur.to_vec());
            let ok = witnesses(boxes, i + 1, used, k, chosen, f);
            chosen.pop();
            ok
        })
    }

    let mut used = vec![1; n];
    let mut chosen = Vec::new();
    witnesses(&boxes, 0, &mut used, k, &mut chosen, &mut |wit| {
        let mut dom = vec![full; cells.len()];
        for (b, w) in boxes.iter().zip(wit) {
            let mask = mask_of(b);
            for (i, cell) in cells.iter().enumerate() {
                if w.iter().all(|&(a, v)| cell[a] == v) && committed_ok(&b.modality, cell) {
                    dom[i] &= mask;
                }
            }
        }
        !dom.contains(&0) && solve_cells(&mut dom, &clauses)
    })
}

/// Each clause `(cells, mask)` demands some listed cell with its value in
/// `mask`; cells take values in their domain bitmasks.
fn solve_cells(dom: &mut [u32], clauses: &[(Vec<usize>, u32)]) -> bool {
    let mut best: Option<(u32, Vec<usize>)> = None;
    for (cells, mask) in clauses {
        if cells.iter().any(|&c| dom[c] & !mask == 0) {
            continue;
        }
        let viable: Vec<usize> = cells.iter().copied().filter(|&c| dom[c] & mask != 0).collect();
        if viable.is_empty() {
            return false;
        }
        if best.as_ref().map_or(true, |(_, v)| viable.len() < v.len()) {
            best = Some((*mask, viable));
        }
    }
    let Some((mask, viable)) = best else { return true };
    let saved = dom.to_vec();
    for c in viable {
        let old = dom[c];
        dom[c] = old & mask;
        if solve_cells(dom, clauses) {
            return true;
        }
        dom[c] = old & !mask;
        if dom[c] == 0 {
            break;
        }
    }
    dom.copy_from_slice(&saved);
    false
}

pub fn product(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                (0..d).map(move |i| {
                    let mut v = v.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

/// All ground clause sets over `|W| = w`, `|Y| = y` with at most `max`
/// clauses (clauses may contain `∅` literals and may be empty).
pub fn all_prop_clause_sets(w: usize, y: usize, max: usize) -> Vec<Vec<PropClause>> {
    let subsets: Vec<BTreeSet<usize>> = (0..1usize << w).map(|m| (0..w).filter(|i| m & (1 << i) != 0).collect()).collect();
    let mut universe = Vec::new();
    for choice in product(&vec![subsets.len() + 1; y]) {
        let m = choice
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(yi, &c)| (yi, subsets[c - 1].clone()))
            .collect();
        universe.push(PropClause(m));
    }
    universe.sort();
    universe.dedup();
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(usize, Vec<PropClause>)> = vec![(0, Vec::new())];
    for _ in 0..max {
        let mut next = Vec::new();
        for (from, set) in &frontier {
            for i in *from..universe.len() {
                let mut s = set.clone();
                s.push(universe[i].clone());
                next.push((i + 1, s));
            }
        }
        out.extend(next.iter().map(|(_, s)| s.clone()));
        frontier = next;
    }
    out
}

pub fn prop_satisfiable(phi: &[PropClause], w: usize, y: usize) -> bool {
    product(&vec![w; y]).iter().any(|f| phi.iter().all(|c| c.satisfied_by(f)))
}

/// Random closed formula in negation normal form over `atoms`.
pub fn random_formula<R: Rng>(r: &mut R, sig: &Signature, depth: usize, atoms: &[&str]) -> Formula {
    fn go<R: Rng>(r: &mut R, sig: &Signature, depth: usize, atoms: &[&str], bound: &mut Vec<String>, fresh: &mut usize) -> Formula {
        if depth == 0 || r.gen_bool(0.2) {
            let choice = r.gen_range(0..10);
            return match choice {
                0 => Formula::Top,
                1 => Formula::Bot,
                2..=4 if !bound.is_empty() => Formula::var(bound.choose(r).unwrap()),
                5..=6 => Formula::neg_atom(atoms.choose(r).unwrap()),
                _ => Formula::atom(atoms.choose(r).unwrap()),
            };
        }
        match r.gen_range(0..8) {
            0 | 1 => Formula::and(go(r, sig, depth - 1, atoms, bound, fresh), go(r, sig, depth - 1, atoms, bound, fresh)),
            2 | 3 => Formula::or(go(r, sig, depth - 1, atoms, bound, fresh), go(r, sig, depth - 1, atoms, bound, fresh)),
            4 => Formula::boxed(random_modality(r, sig), go(r, sig, depth - 1, atoms, bound, fresh)),
            5 => Formula::diamond(random_modality(r, sig), go(r, sig, depth - 1, atoms, bound, fresh)),
            k => {
                let x = format!("X{fresh}");
                *fresh += 1;
                bound.push(x.clone());
                let body = go(r, sig, depth - 1, atoms, bound, fresh);
                bound.pop();
                if k == 6 {
                    Formula::mu(&x, body)
                } else {
                    Formula::nu(&x, body)
                }
            }
        }
    }
    go(r, sig, depth, atoms, &mut Vec::new(), &mut 0)
}

/// `pre[C,O](y)` straight from the definition: some joint move of `C` such
/// that every full joint move extending it, whose restriction to the
/// committed agents interprets a member of `O`, leads into `y`.
pub fn brute_pre(s: &Cgses, m: &Modality, y: &BTreeSet<usize>) -> BTreeSet<usize> {
    let n = s.n_agents();
    (0..s.n_states())
        .filter(|&w| {
            let st = &s.states[w];
            let fulls = product(&st.k);
            let committed: Vec<Vec<(usize, usize)>> = m
                .commitment
                .moves()
                .iter()
                .map(|o| o.0.iter().map(|&(a, x)| (a, st.interp[a][x])).collect())
                .collect();
            let c: Vec<usize> = (0..n).filter(|&a| m.coalition.contains(a)).collect();
            let kc: Vec<usize> = c.iter().map(|&a| st.k[a]).collect();
            product(&kc).iter().any(|mc| {
                fulls.iter().all(|full| {
                    let extends = c.iter().zip(mc).all(|(&a, &i)| full[a] == i);
                    let in_o = m.commitment.is_empty()
                        || committed.iter().any(|o| o.iter().all(|&(a, i)| full[a] == i));
                    !(extends && in_o) || y.contains(&s.outcome(w, full))
                })
            })
        })
        .collect()
}

/// Every completion of the move interpretations of `s`.
pub fn all_interpretations(s: &Cgses) -> Vec<Cgses> {
    let mut slots = Vec::new();
    for (w, st) in s.states.iter().enumerate() {
        for (a, ms) in s.sig.moves.iter().enumerate() {
            for x in 0..ms.len() {
                slots.push((w, a, x, st.k[a]));
            }
        }
    }
    let dims: Vec<usize> = slots.iter().map(|s| s.3).collect();
    product(&dims)
        .into_iter()
        .map(|choice| {
            let mut m = s.clone();
            for (&(w, a, x, _), &i) in slots.iter().zip(&choice) {
                m.states[w].interp[a][x] = i;
            }
            m
        })
        .collect()
}

/// Winners by enumerating Eloise's positional strategies; against a fixed
/// strategy Abelard wins from `v` iff he can reach a stuck Eloise node or a
/// cycle whose largest priority is odd.
pub fn parity_oracle(g: &ParityGame) -> Vec<Owner> {
    let n = g.len();
    let choosers: Vec<usize> = (0..n).filter(|&v| g.nodes[v].owner == Owner::Eloise && !g.nodes[v].succ.is_empty()).collect();
    let dims: Vec<usize> = choosers.iter().map(|&v| g.nodes[v].succ.len()).collect();
    let mut eloise = vec![false; n];
    for choice in product(&dims) {
        let mut succ: Vec<Vec<usize>> = g.nodes.iter().map(|x| x.succ.clone()).collect();
        for (&v, &i) in choosers.iter().zip(&choice) {
            succ[v] = vec![g.nodes[v].succ[i]];
        }
        let reach = |from: &[usize], allowed: &dyn Fn(usize) -> bool| {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = from.iter().copied().filter(|&u| allowed(u)).collect();
            while let Some(u) = stack.pop() {
                if !seen[u] {
                    seen[u] = true;
                    stack.extend(succ[u].iter().copied().filter(|&t| allowed(t)));
                }
            }
            seen
        };
        let mut bad: Vec<usize> = (0..n).filter(|&v| g.nodes[v].owner == Owner::Eloise && succ[v].is_empty()).collect();
        for u in 0..n {
            let p = g.nodes[u].priority;
            if p % 2 == 1 && reach(&succ[u], &|t| g.nodes[t].priority <= p)[u] {
                bad.push(u);
            }
        }
        for v in 0..n {
            if !reach(&[v], &|_| true).iter().enumerate().any(|(u, &r)| r && bad.contains(&u)) {
                eloise[v] = true;
            }
        }
    }
    eloise.into_iter().map(|e| if e { Owner::Eloise } else { Owner::Abelard }).collect()
}

/// Every game on `n` nodes with priorities `0..=max_prio`, in a fixed order.
pub fn all_games(n: usize, max_prio: u32) -> impl Iterator<Item = ParityGame> {
    let labels = 2 * (max_prio as usize + 1);
    let label_dims = vec![labels; n];
    let labelings = product(&label_dims);
    labelings.into_iter().flat_map(move |lab| {
        (0u64..1 << (n * n)).map(move |edges| {
            let mut g = ParityGame::new();
            for &l in &lab {
                let owner = if l % 2 == 0 { Owner::Eloise } else { Owner::Abelard };
                g.add_node(owner, (l / 2) as u32);
            }
            for e in 0..n * n {
                if edges & (1 << e) != 0 {
                    g.add_edge(e / n, e % n);
                }
            }
            g
        })
    })
}

pub fn random_game<R: Rng>(r: &mut R, n: usize, max_prio: u32) -> ParityGame {
    let mut g = ParityGame::new();
    for _ in 0..n {
        let owner = if r.gen_bool(0.5) { Owner::Eloise } else { Owner::Abelard };
        g.add_node(owner, r.gen_range(0..=max_prio));
    }
    for v in 0..n {
        for w in 0..n {
            if r.gen_bool(0.35) {
                g.add_edge(v, w);
            }
        }
    }
    g
}
