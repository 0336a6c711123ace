use std::collections::{BTreeMap, HashMap, VecDeque};

use super::Formula;

/// Fischer–Ladner closure of a closed formula.
///
/// Elements are closed formulas in breadth-first discovery order, so the
/// input is element 0. A fixpoint element's only successor is its one-step
/// unfolding.
#[derive(Clone, Debug)]
pub struct Closure {
    pub formulas: Vec<Formula>,
    pub succ: Vec<Vec<usize>>,
    /// Priority of each fixpoint element (even for ν, odd for µ); 0 elsewhere.
    pub priority: Vec<u32>,
    pub binder_priority: BTreeMap<String, u32>,
    index: HashMap<Formula, usize>,
}

impl Closure {
    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn is_modal(&self, i: usize) -> bool {
        self.formulas[i].is_modal()
    }

    pub fn is_literal(&self, i: usize) -> bool {
        self.formulas[i].is_literal()
    }

    pub fn is_fixpoint(&self, i: usize) -> bool {
        self.formulas[i].is_fixpoint()
    }

    pub fn max_priority(&self) -> u32 {
        self.priority.iter().copied().max().unwrap_or(0)
    }
}

/// Binder priorities: each binder gets the least value of its parity that
/// exceeds every binder nested inside its body, so outer fixpoints dominate.
pub(crate) fn binder_priorities(f: &Formula) -> BTreeMap<String, u32> {
    fn go(f: &Formula, out: &mut BTreeMap<String, u32>) -> Option<u32> {
        let inner = f.children().into_iter().filter_map(|c| go(c, out)).max();
        match f {
            Formula::Mu(x, _) | Formula::Nu(x, _) => {
                let parity = if matches!(f, Formula::Mu(..)) { 1 } else { 0 };
                let p = match inner {
                    None => parity,
                    Some(m) => {
                        let c = m + 1;
                        if c % 2 == parity { c } else { c + 1 }
                    }
                };
                out.insert(x.clone(), p);
                Some(p)
            }
            _ => inner,
        }
    }
    let mut out = BTreeMap::new();
    go(f, &mut out);
    out
}

/// Computes the closure of a closed formula.
pub fn closure(phi: &Formula) -> Closure {
    let binder_priority = binder_priorities(phi);
    let mut formulas = Vec::new();
    let mut index = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |f: Formula, formulas: &mut Vec<Formula>, queue: &mut VecDeque<usize>| -> usize {
        if let Some(&i) = index.get(&f) {
            return i;
        }
        let i = formulas.len();
        index.insert(f.clone(), i);
        formulas.push(f);
        queue.push_back(i);
        i
    };
    intern(phi.clone(), &mut formulas, &mut queue);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let f = formulas[i].clone();
        let kids: Vec<Formula> = if f.is_fixpoint() {
            vec![f.unfold_raw().expect("fixpoint")]
        } else {
            f.children().into_iter().cloned().collect()
        };
        let ids: Vec<usize> = kids.into_iter().map(|k| intern(k, &mut formulas, &mut queue)).collect();
        if succ.len() <= i {
            succ.resize(i + 1, Vec::new());
        }
        succ[i] = ids;
    }
    succ.resize(formulas.len(), Vec::new());
    let priority = formulas
        .iter()
        .map(|f| match f {
            Formula::Mu(x, _) | Formula::Nu(x, _) => binder_priority.get(x).copied().unwrap_or(0),
            _ => 0,
        })
        .collect();
    Closure { formulas, succ, priority, binder_priority, index }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_infer, Signature};

    #[test]
    fn closure_of_eventually() {
        let mut s = Signature::default();
        let f = parse_infer("mu x. p | <{1}> x", &mut s).unwrap();
        let c = closure(&f);
        assert_eq!(c.len(), 4);
        let unf = f.unfold_raw().unwrap();
        assert_eq!(c.formulas[0], f);
        assert_eq!(c.formulas[1], unf);
        assert!(c.index_of(&Formula::atom("p")).is_some());
        assert_eq!(c.priority[0] % 2, 1);
    }

    #[test]
    fn closure_of_atom() {
        let c = closure(&Formula::atom("p"));
        assert_eq!(c.formulas, vec![Formula::atom("p")]);
    }

    #[test]
    fn outer_fixpoints_dominate() {
        let mut s = Signature::default();
        let f = parse_infer("nu x. mu y. (g & [c] x) | [c] y", &mut s).unwrap();
        let p = binder_priorities(&f);
        assert!(p["x"] > p["y"]);
        assert_eq!(p["x"] % 2, 0);
        assert_eq!(p["y"] % 2, 1);
    }
}
