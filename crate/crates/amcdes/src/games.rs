//! Parity games under the max-even convention: Eloise wins an infinite play
//! iff the largest priority seen infinitely often is even, and the owner of
//! a node without successors loses there.

use std::fmt::Write as _;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Owner {
    Eloise,
    Abelard,
}

impl Owner {
    pub fn opponent(self) -> Owner {
        match self {
            Owner::Eloise => Owner::Abelard,
            Owner::Abelard => Owner::Eloise,
        }
    }

    /// The player favoured by a priority.
    pub fn of_priority(p: u32) -> Owner {
        if p % 2 == 0 {
            Owner::Eloise
        } else {
            Owner::Abelard
        }
    }

    fn index(self) -> usize {
        match self {
            Owner::Eloise => 0,
            Owner::Abelard => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub owner: Owner,
    pub priority: u32,
    pub succ: Vec<usize>,
    pub name: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct ParityGame {
    pub nodes: Vec<Node>,
}

/// Winning regions and positional strategies. `strategy[v]` is the chosen
/// successor for the owner of `v` when `v` lies in that owner's region.
#[derive(Clone, Debug)]
pub struct Solution {
    pub winner: Vec<Owner>,
    pub strategy: Vec<Option<usize>>,
}

impl Solution {
    pub fn region(&self, p: Owner) -> Vec<usize> {
        (0..self.winner.len()).filter(|&v| self.winner[v] == p).collect()
    }
}

impl ParityGame {
    pub fn new() -> ParityGame {
        ParityGame::default()
    }

    pub fn add_node(&mut self, owner: Owner, priority: u32) -> usize {
        self.nodes.push(Node { owner, priority, succ: Vec::new(), name: None });
        self.nodes.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        if !self.nodes[from].succ.contains(&to) {
            self.nodes[from].succ.push(to);
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.nodes.len()];
        for (v, n) in self.nodes.iter().enumerate() {
            for &w in &n.succ {
                pred[w].push(v);
            }
        }
        pred
    }

    /// Solves the game with Zielonka's recursive algorithm.
    pub fn solve(&self) -> Solution {
        let n = self.nodes.len();
        // Dead ends are routed to two fresh sinks won by the opponent.
        let mut g = self.clone();
        let sink_e = g.add_node(Owner::Eloise, 0);
        let sink_a = g.add_node(Owner::Abelard, 1);
        g.add_edge(sink_e, sink_e);
        g.add_edge(sink_a, sink_a);
        for v in 0..n {
            if g.nodes[v].succ.is_empty() {
                let s = if g.nodes[v].owner == Owner::Eloise { sink_a } else { sink_e };
                g.nodes[v].succ.push(s);
            }
        }
        let pred = g.predecessors();
        let mut z = Zielonka { g: &g, pred: &pred, strategy: vec![None; g.len()] };
        let all = vec![true; g.len()];
        let (w, _) = z.solve(&all);
        let winner = (0..n).map(|v| if w[v] { Owner::Eloise } else { Owner::Abelard }).collect();
        let strategy = (0..n)
            .map(|v| z.strategy[v].filter(|&s| s < n && !self.nodes[v].succ.is_empty()))
            .collect();
        Solution { winner, strategy }
    }

    /// Checks that `sol.strategy` wins for each player from its region: every
    /// play consistent with it stays in the region, never gets stuck at the
    /// player's own node, and every reachable cycle has the player's parity.
    pub fn verify(&self, sol: &Solution) -> Result<(), String> {
        for p in [Owner::Eloise, Owner::Abelard] {
            let region: Vec<bool> = sol.winner.iter().map(|&w| w == p).collect();
            let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
            for v in 0..self.len() {
                if !region[v] {
                    continue;
                }
                let node = &self.nodes[v];
                if node.owner == p {
                    if node.succ.is_empty() {
                        return Err(format!("node {v} is a dead end of its winner"));
                    }
                    let s = sol.strategy[v].ok_or(format!("no strategy at node {v}"))?;
                    if !node.succ.contains(&s) {
                        return Err(format!("strategy at {v} is not a move"));
                    }
                    succ[v].push(s);
                } else {
                    succ[v] = node.succ.clone();
                }
                if succ[v].iter().any(|&w| !region[w]) {
                    return Err(format!("play escapes the region of {p:?} at {v}"));
                }
            }
            let max = self.nodes.iter().map(|n| n.priority).max().unwrap_or(0);
            for d in (0..=max).filter(|&d| Owner::of_priority(d) != p) {
                let keep: Vec<bool> =
                    (0..self.len()).map(|v| region[v] && self.nodes[v].priority <= d).collect();
                for comp in sccs(&succ, &keep) {
                    let cyclic = comp.len() > 1 || succ[comp[0]].contains(&comp[0]);
                    if cyclic && comp.iter().any(|&v| self.nodes[v].priority == d) {
                        return Err(format!("cycle with priority {d} lost by {p:?}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Writes the game in PGSolver's textual format.
    pub fn to_pgsolver(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "parity {};", self.len().saturating_sub(1));
        for (v, n) in self.nodes.iter().enumerate() {
            let succ: Vec<String> = n.succ.iter().map(|w| w.to_string()).collect();
            let owner = n.owner.index();
            let _ = write!(s, "{v} {} {owner} {}", n.priority, succ.join(","));
            if let Some(name) = &n.name {
                let _ = write!(s, " \"{name}\"");
            }
            s.push_str(";\n");
        }
        s
    }

    /// Parses PGSolver's textual format; node identifiers may be sparse.
    pub fn from_pgsolver(text: &str) -> Result<ParityGame, String> {
        let mut entries = Vec::new();
        for stmt in text.split(';') {
            let stmt = stmt.trim();
            if stmt.is_empty() || stmt.starts_with("parity") || stmt.starts_with("start") {
                continue;
            }
            let (body, name) = match stmt.find('"') {
                Some(i) => (&stmt[..i], Some(stmt[i..].trim_matches('"').to_string())),
                None => (stmt, None),
            };
            let parts: Vec<&str> = body.split_whitespace().collect();
            if parts.len() < 3 {
                return Err(format!("malformed node line: {stmt}"));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|e| format!("{s}: {e}"));
            let id = num(parts[0])?;
            let prio = num(parts[1])? as u32;
            let owner = match parts[2] {
                "0" => Owner::Eloise,
                "1" => Owner::Abelard,
                o => return Err(format!("bad owner {o}")),
            };
            let succ = match parts.get(3) {
                Some(s) => s.split(',').filter(|x| !x.is_empty()).map(num).collect::<Result<Vec<_>, _>>()?,
                None => Vec::new(),
            };
            entries.push((id, prio, owner, succ, name));
        }
        let n = entries.iter().map(|e| e.0 + 1).max().unwrap_or(0);
        let mut g = ParityGame { nodes: Vec::with_capacity(n) };
        for _ in 0..n {
            g.add_node(Owner::Abelard, 0);
        }
        let mut defined = vec![false; n];
        for (id, prio, owner, succ, name) in entries {
            if std::mem::replace(&mut defined[id], true) {
                return Err(format!("node {id} defined twice"));
            }
            if let Some(&w) = succ.iter().find(|&&w| w >= n) {
                return Err(format!("edge to unknown node {w}"));
            }
            g.nodes[id] = Node { owner, priority: prio, succ, name };
        }
        Ok(g)
    }
}

struct Zielonka<'a> {
    g: &'a ParityGame,
    pred: &'a [Vec<usize>],
    strategy: Vec<Option<usize>>,
}

impl Zielonka<'_> {
    /// Attractor of `target` for `p` inside `sub`, recording attractor moves.
    fn attractor(&mut self, sub: &[bool], target: &[bool], p: Owner) -> Vec<bool> {
        let g = self.g;
        let mut attr = target.to_vec();
        let mut count: Vec<usize> = (0..g.len())
            .map(|v| if sub[v] { g.nodes[v].succ.iter().filter(|&&w| sub[w]).count() } else { 0 })
            .collect();
        let mut stack: Vec<usize> = (0..g.len()).filter(|&v| attr[v]).collect();
        while let Some(w) = stack.pop() {
            for &v in &self.pred[w] {
                if !sub[v] || attr[v] {
                    continue;
                }
                if g.nodes[v].owner == p {
                    attr[v] = true;
                    self.strategy[v] = Some(w);
                    stack.push(v);
                } else {
                    count[v] -= 1;
                    if count[v] == 0 {
                        attr[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        attr
    }

    /// Returns the winning regions (Eloise, Abelard) of the subgame `sub`.
    fn solve(&mut self, sub: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let g = self.g;
        let n = g.len();
        let d = match (0..n).filter(|&v| sub[v]).map(|v| g.nodes[v].priority).max() {
            None => return (vec![false; n], vec![false; n]),
            Some(d) => d,
        };
        let p = Owner::of_priority(d);
        let top: Vec<bool> = (0..n).map(|v| sub[v] && g.nodes[v].priority == d).collect();
        for v in (0..n).filter(|&v| top[v] && g.nodes[v].owner == p) {
            self.strategy[v] = g.nodes[v].succ.iter().copied().find(|&w| sub[w]);
        }
        let a = self.attractor(sub, &top, p);
        let rest: Vec<bool> = (0..n).map(|v| sub[v] && !a[v]).collect();
        let w1 = self.solve(&rest);
        let opp_won = if p == Owner::Eloise { &w1.1 } else { &w1.0 };
        if !opp_won.iter().any(|&b| b) {
            let empty = vec![false; n];
            return if p == Owner::Eloise { (sub.to_vec(), empty) } else { (empty, sub.to_vec()) };
        }
        let b = self.attractor(sub, opp_won, p.opponent());
        let rest2: Vec<bool> = (0..n).map(|v| sub[v] && !b[v]).collect();
        let (mut e, mut ab) = self.solve(&rest2);
        let opp = if p == Owner::Eloise { &mut ab } else { &mut e };
        for v in 0..n {
            if b[v] {
                opp[v] = true;
            }
        }
        (e, ab)
    }
}

/// Strongly connected components of the subgraph induced by `keep`.
pub(crate) fn sccs(succ: &[Vec<usize>], keep: &[bool]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if !keep[root] || index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if !keep[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Exhaustive oracle: enumerates all positional strategy pairs. Only usable
/// on tiny games.
pub fn brute_force_winners(g: &ParityGame) -> Vec<Owner> {
    let n = g.len();
    let choices = |p: Owner| -> Vec<Vec<Option<usize>>> {
        let mut all = vec![vec![None; n]];
        for v in 0..n {
            if g.nodes[v].owner != p || g.nodes[v].succ.is_empty() {
                continue;
            }
            all = all
                .into_iter()
                .flat_map(|s| {
                    g.nodes[v].succ.iter().map(move |&w| {
                        let mut s = s.clone();
                        s[v] = Some(w);
                        s
                    })
                })
                .collect();
        }
        all
    };
    let es = choices(Owner::Eloise);
    let abs = choices(Owner::Abelard);
    let outcome = |start: usize, se: &[Option<usize>], sa: &[Option<usize>]| -> Owner {
        let mut seen = vec![usize::MAX; n];
        let mut path = Vec::new();
        let mut v = start;
        loop {
            if seen[v] != usize::MAX {
                let cyc = &path[seen[v]..];
                let m = cyc.iter().map(|&u: &usize| g.nodes[u].priority).max().unwrap();
                return Owner::of_priority(m);
            }
            seen[v] = path.len();
            path.push(v);
            let next = if g.nodes[v].owner == Owner::Eloise { se[v] } else { sa[v] };
            match next {
                Some(w) => v = w,
                None => return g.nodes[v].owner.opponent(),
            }
        }
    };
    (0..n)
        .map(|v| {
            let e_wins = es.iter().any(|se| abs.iter().all(|sa| outcome(v, se, sa) == Owner::Eloise));
            if e_wins {
                Owner::Eloise
            } else {
                Owner::Abelard
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(owner: Owner, prio: u32) -> ParityGame {
        let mut g = ParityGame::new();
        let v = g.add_node(owner, prio);
        g.add_edge(v, v);
        g
    }

    #[test]
    fn self_loops() {
        assert_eq!(single(Owner::Abelard, 0).solve().winner, vec![Owner::Eloise]);
        assert_eq!(single(Owner::Abelard, 1).solve().winner, vec![Owner::Abelard]);
    }

    #[test]
    fn dead_ends_lose() {
        let mut g = ParityGame::new();
        let a = g.add_node(Owner::Abelard, 1);
        let e = g.add_node(Owner::Eloise, 0);
        let x = g.add_node(Owner::Eloise, 0);
        g.add_edge(x, a);
        let sol = g.solve();
        assert_eq!(sol.winner, vec![Owner::Eloise, Owner::Abelard, Owner::Eloise]);
        assert_eq!(sol.strategy[x], Some(a));
        g.verify(&sol).unwrap();
        let _ = e;
    }

    #[test]
    fn pgsolver_round_trip() {
        let text = "parity 2;\n0 2 0 1,2 \"start\";\n1 1 1 0;\n2 0 1 2;\n";
        let g = ParityGame::from_pgsolver(text).unwrap();
        assert_eq!(g.to_pgsolver(), text);
        let sol = g.solve();
        assert_eq!(sol.winner, brute_force_winners(&g));
        g.verify(&sol).unwrap();
    }
}
