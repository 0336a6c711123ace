//! Concurrent game structures with explicit strategies: data model,
//! validation and the JSON file format.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::formula::{Coalition, JointExplicit, Signature};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateData {
    pub atoms: BTreeSet<String>,
    /// Move count per agent, in agent order.
    pub k: Vec<usize>,
    /// Outcome per joint move, flattened with agent 0 most significant.
    pub outcome: Vec<usize>,
    /// `interp[j][m]` is the move index of explicit move `m` of agent `j`.
    pub interp: Vec<Vec<usize>>,
}

impl StateData {
    pub fn n_joint(&self) -> usize {
        self.k.iter().product()
    }

    /// Flat index of a full joint move.
    pub fn flat(&self, m: &[usize]) -> usize {
        m.iter().zip(&self.k).fold(0, |acc, (&i, &k)| acc * k + i)
    }

    /// Decodes a flat index into a full joint move.
    pub fn unflat(&self, mut idx: usize) -> Vec<usize> {
        let mut m = vec![0; self.k.len()];
        for j in (0..self.k.len()).rev() {
            m[j] = idx % self.k[j];
            idx /= self.k[j];
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cgses {
    pub sig: Signature,
    pub names: Vec<String>,
    pub states: Vec<StateData>,
    /// False for models loaded without move interpretations (open checking).
    pub has_interp: bool,
}

/// A joint move of a coalition: `(agent, move index)` pairs sorted by agent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointMove(pub Vec<(usize, usize)>);

impl JointMove {
    pub fn coalition(&self) -> Coalition {
        Coalition::from_agents(self.0.iter().map(|&(a, _)| a))
    }

    pub fn get(&self, a: usize) -> Option<usize> {
        self.0.iter().find(|&&(b, _)| b == a).map(|&(_, m)| m)
    }

    pub fn restrict(&self, c: Coalition) -> JointMove {
        JointMove(self.0.iter().copied().filter(|&(a, _)| c.contains(a)).collect())
    }
}

/// `n ⊑ m`: `m` restricted to the coalition of `n` equals `n`.
pub fn extends(n: &JointMove, m: &JointMove) -> bool {
    n.0.iter().all(|&(a, i)| m.get(a) == Some(i))
}

/// `n =⊓ m`: agreement on the intersection of the coalitions.
pub fn compatible(n: &JointMove, m: &JointMove) -> bool {
    n.0.iter().all(|&(a, i)| m.get(a).map_or(true, |j| j == i))
}

/// All assignments of move indices to `agents`, each `agents[i]` ranging
/// over `0..k[agents[i]]`, in lexicographic order.
pub(crate) fn assignments(agents: &[usize], k: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &a in agents {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..k[a]).map(move |i| {
                    let mut v = v.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileState {
    atoms: Vec<String>,
    k: BTreeMap<String, i64>,
    outcome: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interp: Option<BTreeMap<String, BTreeMap<String, i64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileModel {
    agents: Vec<String>,
    explicit_moves: BTreeMap<String, Vec<String>>,
    states: BTreeMap<String, FileState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial: Option<String>,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError::Invalid(msg.into()))
}

impl Cgses {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_agents(&self) -> usize {
        self.sig.n_agents()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn outcome(&self, w: usize, m: &[usize]) -> usize {
        let s = &self.states[w];
        s.outcome[s.flat(m)]
    }

    /// Applies the move interpretation at `w` componentwise.
    pub fn interpret_joint(&self, w: usize, m: &JointExplicit) -> JointMove {
        JointMove(m.0.iter().map(|&(a, x)| (a, self.states[w].interp[a][x])).collect())
    }

    /// Like [`Cgses::interpret_joint`] but on `(agent, move)` names.
    pub fn interpret_named(&self, w: usize, m: &[(&str, &str)]) -> Result<JointMove, ModelError> {
        let mut v = Vec::new();
        for &(a, x) in m {
            let ai = match self.sig.agent_index(a) {
                Some(i) => i,
                None => return invalid(format!("unknown agent {a}")),
            };
            let xi = match self.sig.move_index(ai, x) {
                Some(i) => i,
                None => return invalid(format!("unknown move {x} for agent {a}")),
            };
            v.push((ai, xi));
        }
        v.sort();
        Ok(self.interpret_joint(w, &JointExplicit(v)))
    }

    /// Checks all structural invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.n_agents();
        if self.states.is_empty() {
            return invalid("model has no states");
        }
        if self.names.len() != self.states.len() {
            return invalid("state names do not match states");
        }
        if n > 64 {
            return invalid("at most 64 agents are supported");
        }
        for (w, s) in self.states.iter().enumerate() {
            let name = &self.names[w];
            if s.k.len() != n {
                return invalid(format!("move counts at {name} do not cover the agents"));
            }
            if let Some(j) = s.k.iter().position(|&k| k == 0) {
                return invalid(format!("k for agent {} is 0 at {name}", self.sig.agents[j]));
            }
            if s.outcome.len() != s.n_joint() {
                return invalid(format!("outcome not total at {name}"));
            }
            if s.outcome.iter().any(|&v| v >= self.states.len()) {
                return invalid(format!("outcome at {name} leads to an unknown state"));
            }
            if !self.has_interp {
                continue;
            }
            if s.interp.len() != n {
                return invalid(format!("interp at {name} does not cover the agents"));
            }
            for j in 0..n {
                if s.interp[j].len() != self.sig.moves[j].len() {
                    return invalid(format!(
                        "interp for agent {} at {name} is not total",
                        self.sig.agents[j]
                    ));
                }
                if s.interp[j].iter().any(|&x| x >= s.k[j]) {
                    return invalid(format!(
                        "interp for agent {} at {name} is out of range",
                        self.sig.agents[j]
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Cgses, ModelError> {
        Self::from_json_with_initial(text).map(|(m, _)| m)
    }

    /// Parses a model and its optional `initial` state field.
    pub fn from_json_with_initial(text: &str) -> Result<(Cgses, Option<usize>), ModelError> {
        let file: FileModel = serde_json::from_str(text)?;
        let agents = file.agents.clone();
        let mut seen = BTreeSet::new();
        if let Some(a) = agents.iter().find(|a| !seen.insert(a.as_str())) {
            return invalid(format!("agent {a} listed twice"));
        }
        if let Some(a) = file.explicit_moves.keys().find(|a| !agents.contains(a)) {
            return invalid(format!("explicit moves for unknown agent {a}"));
        }
        let moves: Vec<Vec<String>> = agents
            .iter()
            .map(|a| file.explicit_moves.get(a).cloned().unwrap_or_default())
            .collect();
        let sig = Signature::new(agents.clone(), moves);
        let names: Vec<String> = file.states.keys().cloned().collect();
        let index = |s: &str| names.iter().position(|n| n == s);
        let has_interp = file.states.values().any(|s| s.interp.is_some());
        let mut states = Vec::new();
        for (name, fs) in &file.states {
            if let Some(a) = fs.k.keys().find(|a| !agents.contains(a)) {
                return invalid(format!("k at {name} names unknown agent {a}"));
            }
            let mut k = Vec::new();
            for a in &agents {
                match fs.k.get(a) {
                    Some(&v) if v >= 1 => k.push(v as usize),
                    Some(_) => return invalid(format!("k for agent {a} is 0 at {name}")),
                    None => return invalid(format!("k at {name} misses agent {a}")),
                }
            }
            let mut st = StateData {
                atoms: fs.atoms.iter().cloned().collect(),
                k,
                outcome: Vec::new(),
                interp: Vec::new(),
            };
            let mut table = vec![None; st.n_joint()];
            for (key, target) in &fs.outcome {
                let idx: Result<Vec<usize>, _> = key.split(',').map(|x| x.trim().parse::<usize>()).collect();
                let idx = match idx {
                    Ok(v) if v.len() == agents.len() && v.iter().zip(&st.k).all(|(i, k)| i < k) => v,
                    _ => return invalid(format!("bad outcome key {key:?} at {name}")),
                };
                let t = match index(target) {
                    Some(t) => t,
                    None => return invalid(format!("outcome at {name} leads to unknown state {target}")),
                };
                table[st.flat(&idx)] = Some(t);
            }
            if table.iter().any(|t| t.is_none()) {
                return invalid(format!("outcome not total at {name}"));
            }
            st.outcome = table.into_iter().map(|t| t.unwrap()).collect();
            if has_interp {
                let Some(fi) = &fs.interp else {
                    return invalid(format!("interp missing at {name}"));
                };
                if let Some(a) = fi.keys().find(|a| !agents.contains(a)) {
                    return invalid(format!("interp at {name} names unknown agent {a}"));
                }
                for (j, a) in agents.iter().enumerate() {
                    let empty = BTreeMap::new();
                    let m = fi.get(a).unwrap_or(&empty);
                    if let Some(x) = m.keys().find(|x| !sig.moves[j].contains(x)) {
                        return invalid(format!("interp at {name} names unknown move {x} of {a}"));
                    }
                    let mut row = Vec::new();
                    for x in &sig.moves[j] {
                        match m.get(x) {
                            Some(&v) if v >= 0 && (v as usize) < st.k[j] => row.push(v as usize),
                            Some(_) => {
                                return invalid(format!("interp for agent {a} at {name} is out of range"))
                            }
                            None => return invalid(format!("interp for agent {a} at {name} is not total")),
                        }
                    }
                    st.interp.push(row);
                }
            } else {
                st.interp = sig.moves.iter().map(|m| vec![0; m.len()]).collect();
            }
            states.push(st);
        }
        let initial = match &file.initial {
            Some(s) => match index(s) {
                Some(i) => Some(i),
                None => return invalid(format!("unknown initial state {s}")),
            },
            None => None,
        };
        let has_interp = has_interp || sig.moves.iter().all(|m| m.is_empty());
        let model = Cgses { sig, names, states, has_interp };
        model.validate()?;
        Ok((model, initial))
    }

    pub fn to_json(&self) -> String {
        self.to_json_with_initial(None)
    }

    /// Canonical JSON: keys sorted, outcome keys over the full product.
    pub fn to_json_with_initial(&self, initial: Option<usize>) -> String {
        let agents = &self.sig.agents;
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(w, s)| {
                let outcome = (0..s.n_joint())
                    .map(|i| {
                        let key: Vec<String> = s.unflat(i).iter().map(|x| x.to_string()).collect();
                        (key.join(","), self.names[s.outcome[i]].clone())
                    })
                    .collect();
                let interp = self.has_interp.then(|| {
                    agents
                        .iter()
                        .enumerate()
                        .map(|(j, a)| {
                            let row = self.sig.moves[j]
                                .iter()
                                .zip(&s.interp[j])
                                .map(|(x, &v)| (x.clone(), v as i64))
                                .collect();
                            (a.clone(), row)
                        })
                        .collect()
                });
                let fs = FileState {
                    atoms: s.atoms.iter().cloned().collect(),
                    k: agents.iter().zip(&s.k).map(|(a, &k)| (a.clone(), k as i64)).collect(),
                    outcome,
                    interp,
                };
                (self.names[w].clone(), fs)
            })
            .collect();
        let file = FileModel {
            agents: agents.clone(),
            explicit_moves: agents.iter().cloned().zip(self.sig.moves.iter().cloned()).collect(),
            states,
            initial: initial.map(|i| self.names[i].clone()),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("serializable");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Cgses, ModelError> {
        Cgses::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// A random valid model over `sig` with `n` states, move counts in
    /// `1..=max_k`, and atoms drawn from `atoms`.
    pub fn random<R: Rng>(rng: &mut R, sig: &Signature, n: usize, max_k: usize, atoms: &[&str]) -> Cgses {
        let states = (0..n)
            .map(|_| {
                let k: Vec<usize> = (0..sig.n_agents()).map(|_| rng.gen_range(1..=max_k)).collect();
                let total: usize = k.iter().product();
                StateData {
                    atoms: atoms.iter().filter(|_| rng.gen_bool(0.5)).map(|a| a.to_string()).collect(),
                    outcome: (0..total).map(|_| rng.gen_range(0..n)).collect(),
                    interp: sig
                        .moves
                        .iter()
                        .enumerate()
                        .map(|(j, ms)| ms.iter().map(|_| rng.gen_range(0..k[j])).collect())
                        .collect(),
                    k,
                }
            })
            .collect();
        Cgses {
            sig: sig.clone(),
            names: (0..n).map(|i| format!("w{i}")).collect(),
            states,
            has_interp: true,
        }
    }
}
