//! Formula corpora: plain text, one formula per line. A line `agents A B ..`
//! starts a block whose formulas are parsed over those agents, and
//! `moves A m n ..` declares named moves of `A` in that block; further named
//! moves are inferred per formula. `#` starts a comment.

use crate::error::FormulaError;
use crate::formula::{parse_infer, Formula, Signature};

#[derive(Clone, Debug)]
pub struct Entry {
    pub line: usize,
    pub text: String,
    pub sig: Signature,
    pub formula: Formula,
}

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {source}")]
pub struct CorpusError {
    pub line: usize,
    #[source]
    pub source: FormulaError,
}

pub fn parse_corpus(text: &str) -> Result<Vec<Entry>, CorpusError> {
    let mut block = Signature::anonymous(0);
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("agents ") {
            let agents: Vec<String> = rest.split_whitespace().map(String::from).collect();
            let n = agents.len();
            block = Signature::new(agents, vec![Vec::new(); n]);
            continue;
        }
        if let Some(rest) = line.strip_prefix("moves ") {
            let mut words = rest.split_whitespace();
            let a = words.next().map(|a| block.add_agent(a)).unwrap_or_default();
            for m in words {
                block.add_move(a, m);
            }
            continue;
        }
        let mut sig = block.clone();
        let formula = parse_infer(line, &mut sig).map_err(|source| CorpusError { line: i + 1, source })?;
        out.push(Entry { line: i + 1, text: line.to_string(), sig, formula });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_reset_the_signature() {
        let c = parse_corpus("agents a b\n[a] p # c\n\nagents x y\nmoves x stay\n<y, (x:go)> q\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].sig.agents, vec!["a", "b"]);
        assert_eq!(c[1].sig.moves[0], vec!["stay", "go"]);
        assert_eq!(c[1].line, 6);
    }

    #[test]
    fn errors_carry_the_line() {
        let e = parse_corpus("agents a\n\n[a p\n").unwrap_err();
        assert_eq!(e.line, 3);
    }
}
