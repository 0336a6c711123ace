use std::collections::{BTreeSet, HashSet};

use super::{Coalition, Commitment, Formula, JointExplicit, Modality, Signature};
use crate::error::FormulaError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((pos, Tok::Ident(s)));
        } else if "()[]<>{},:|&!.".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(FormulaError::Syntax { pos, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

/// Surface syntax before negation is pushed inwards.
enum Raw {
    Top,
    Bot,
    Name(String),
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Box(Modality, Box<Raw>),
    Diamond(Modality, Box<Raw>),
    Mu(String, Box<Raw>),
    Nu(String, Box<Raw>),
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    sig: &'a mut Signature,
    infer: bool,
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn peek_sym(&self, c: char) -> bool {
        matches!(self.toks.get(self.at), Some((_, Tok::Sym(d))) if *d == c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek_sym(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), FormulaError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn ident(&mut self) -> Result<String, FormulaError> {
        match self.toks.get(self.at) {
            Some((_, Tok::Ident(s))) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn or(&mut self) -> Result<Raw, FormulaError> {
        let mut lhs = self.and()?;
        while self.eat('|') {
            let rhs = self.and()?;
            lhs = Raw::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Raw, FormulaError> {
        let mut lhs = self.unary()?;
        while self.eat('&') {
            let rhs = self.unary()?;
            lhs = Raw::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Raw, FormulaError> {
        if self.eat('!') {
            return Ok(Raw::Not(Box::new(self.unary()?)));
        }
        if self.eat('(') {
            let f = self.or()?;
            self.expect(')')?;
            return Ok(f);
        }
        if self.eat('[') {
            let m = self.modality(']')?;
            return Ok(Raw::Box(m, Box::new(self.unary()?)));
        }
        if self.eat('<') {
            let m = self.modality('>')?;
            return Ok(Raw::Diamond(m, Box::new(self.unary()?)));
        }
        let name = self.ident()?;
        match name.as_str() {
            "true" => Ok(Raw::Top),
            "false" => Ok(Raw::Bot),
            "mu" | "nu" => {
                let x = self.ident()?;
                if is_keyword(&x) {
                    return self.err("keyword used as variable");
                }
                self.expect('.')?;
                let body = self.or()?;
                Ok(if name == "mu" { Raw::Mu(x, Box::new(body)) } else { Raw::Nu(x, Box::new(body)) })
            }
            _ => Ok(Raw::Name(name)),
        }
    }

    fn agent(&mut self) -> Result<usize, FormulaError> {
        let a = self.ident()?;
        if self.infer {
            return Ok(self.sig.add_agent(&a));
        }
        self.sig.agent_index(&a).ok_or(FormulaError::UnknownAgent(a))
    }

    fn mv(&mut self, agent: usize) -> Result<usize, FormulaError> {
        let m = self.ident()?;
        if self.infer {
            return Ok(self.sig.add_move(agent, &m));
        }
        self.sig.move_index(agent, &m).ok_or_else(|| FormulaError::UnknownMove {
            agent: self.sig.agents[agent].clone(),
            mv: m,
        })
    }

    fn modality(&mut self, close: char) -> Result<Modality, FormulaError> {
        let coalition = if self.eat('{') {
            let mut c = Coalition::EMPTY;
            if !self.eat('}') {
                loop {
                    c = c.with(self.agent()?);
                    if self.eat('}') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
            c
        } else {
            Coalition::single(self.agent()?)
        };
        let commitment = if self.eat(',') { self.commitment()? } else { Commitment::empty() };
        self.expect(close)?;
        Ok(Modality::new(coalition, commitment))
    }

    fn commitment(&mut self) -> Result<Commitment, FormulaError> {
        self.expect('(')?;
        let mut moves = Vec::new();
        let mut agents = None;
        loop {
            let joints = self.joint()?;
            for j in joints {
                let ag = j.agents();
                if *agents.get_or_insert(ag) != ag {
                    return self.err("joint moves of a commitment must name the same agents");
                }
                moves.push(j);
            }
            if self.eat(')') {
                break;
            }
            self.expect('|')?;
        }
        Commitment::new(agents.unwrap_or_default(), moves)
    }

    /// `A:m, B:n` or with the `A:{m|n}` shorthand, expanded to a product.
    fn joint(&mut self) -> Result<Vec<JointExplicit>, FormulaError> {
        let mut parts: Vec<(usize, Vec<usize>)> = Vec::new();
        loop {
            let a = self.agent()?;
            if parts.iter().any(|&(b, _)| b == a) {
                return self.err("agent named twice in a joint move");
            }
            self.expect(':')?;
            let choices = if self.eat('{') {
                let mut v = vec![self.mv(a)?];
                while self.eat('|') {
                    v.push(self.mv(a)?);
                }
                self.expect('}')?;
                v
            } else {
                vec![self.mv(a)?]
            };
            parts.push((a, choices));
            if !self.eat(',') {
                break;
            }
        }
        parts.sort_by_key(|p| p.0);
        let mut out = vec![JointExplicit::default()];
        for (a, choices) in parts {
            out = out
                .into_iter()
                .flat_map(|j| {
                    choices.iter().map(move |&m| {
                        let mut v = j.0.clone();
                        v.push((a, m));
                        JointExplicit(v)
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "true" | "false" | "mu" | "nu")
}

fn names(r: &Raw, out: &mut HashSet<String>) {
    match r {
        Raw::Name(n) => {
            out.insert(n.clone());
        }
        Raw::Mu(x, a) | Raw::Nu(x, a) => {
            out.insert(x.clone());
            names(a, out);
        }
        Raw::Not(a) | Raw::Box(_, a) | Raw::Diamond(_, a) => names(a, out),
        Raw::And(a, b) | Raw::Or(a, b) => {
            names(a, out);
            names(b, out);
        }
        Raw::Top | Raw::Bot => {}
    }
}

struct Nnf<'a> {
    used: &'a mut HashSet<String>,
    binders: BTreeSet<String>,
    /// Source name -> (unique name, negation parity at the binder).
    scope: Vec<(String, String, bool)>,
}

impl Nnf<'_> {
    fn go(&mut self, r: &Raw, neg: bool) -> Result<Formula, FormulaError> {
        Ok(match r {
            Raw::Top => if neg { Formula::Bot } else { Formula::Top },
            Raw::Bot => if neg { Formula::Top } else { Formula::Bot },
            Raw::Not(a) => self.go(a, !neg)?,
            Raw::Name(n) => match self.scope.iter().rev().find(|(src, _, _)| src == n) {
                Some((_, uniq, parity)) => {
                    if *parity != neg {
                        return Err(FormulaError::NonMonotone(n.clone()));
                    }
                    Formula::Var(uniq.clone())
                }
                None if neg => Formula::NegAtom(n.clone()),
                None => Formula::Atom(n.clone()),
            },
            Raw::And(a, b) | Raw::Or(a, b) => {
                let (fa, fb) = (self.go(a, neg)?, self.go(b, neg)?);
                if matches!(r, Raw::And(..)) != neg {
                    Formula::and(fa, fb)
                } else {
                    Formula::or(fa, fb)
                }
            }
            Raw::Box(m, a) | Raw::Diamond(m, a) => {
                let body = self.go(a, neg)?;
                if matches!(r, Raw::Box(..)) != neg {
                    Formula::boxed(m.clone(), body)
                } else {
                    Formula::diamond(m.clone(), body)
                }
            }
            Raw::Mu(x, a) | Raw::Nu(x, a) => {
                let uniq = if self.binders.contains(x) {
                    super::fresh(x, self.used)
                } else {
                    x.clone()
                };
                self.binders.insert(uniq.clone());
                self.scope.push((x.clone(), uniq.clone(), neg));
                let body = self.go(a, neg)?;
                self.scope.pop();
                if matches!(r, Raw::Mu(..)) != neg {
                    Formula::Mu(uniq, Box::new(body))
                } else {
                    Formula::Nu(uniq, Box::new(body))
                }
            }
        })
    }
}

fn run(text: &str, sig: &mut Signature, infer: bool) -> Result<Formula, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), sig, infer };
    let raw = p.or()?;
    if p.at < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    let mut used = HashSet::new();
    names(&raw, &mut used);
    let mut nnf = Nnf { used: &mut used, binders: BTreeSet::new(), scope: Vec::new() };
    let f = nnf.go(&raw, false)?;
    f.validate(p.sig)?;
    Ok(f)
}

/// Parses a formula over a fixed signature.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, FormulaError> {
    let mut s = sig.clone();
    run(text, &mut s, false)
}

/// Parses a formula, extending `sig` with every agent and move it mentions
/// (in order of first appearance).
pub fn parse_infer(text: &str, sig: &mut Signature) -> Result<Formula, FormulaError> {
    run(text, sig, true)
}
