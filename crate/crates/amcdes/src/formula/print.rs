use std::fmt;

use super::{Coalition, Commitment, Formula, Modality, Signature};

/// Renders a formula in the concrete syntax accepted by [`super::parse`].
pub struct Display<'a> {
    pub(super) f: &'a Formula,
    pub(super) sig: &'a Signature,
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(out, self.f, self.sig, 0)
    }
}

fn write_coalition(out: &mut fmt::Formatter<'_>, c: Coalition, sig: &Signature) -> fmt::Result {
    let names: Vec<&str> = c.iter().map(|a| sig.agents[a].as_str()).collect();
    write!(out, "{{{}}}", names.join(","))
}

fn write_commitment(out: &mut fmt::Formatter<'_>, o: &Commitment, sig: &Signature) -> fmt::Result {
    let joints: Vec<String> = o
        .moves()
        .iter()
        .map(|j| {
            j.0.iter()
                .map(|&(a, m)| format!("{}:{}", sig.agents[a], sig.moves[a][m]))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    write!(out, "({})", joints.join(" | "))
}

pub(crate) fn write_modality(
    out: &mut fmt::Formatter<'_>,
    m: &Modality,
    sig: &Signature,
) -> fmt::Result {
    write_coalition(out, m.coalition, sig)?;
    if !m.commitment.is_empty() {
        write!(out, ", ")?;
        write_commitment(out, &m.commitment, sig)?;
    }
    Ok(())
}

// Precedence levels: 0 top, 1 operand of `|`, 2 operand of `&`, 3 prefix operand.
fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula, sig: &Signature, ctx: u8) -> fmt::Result {
    match f {
        Formula::Top => write!(out, "true"),
        Formula::Bot => write!(out, "false"),
        Formula::Atom(p) | Formula::Var(p) => write!(out, "{p}"),
        Formula::NegAtom(p) => write!(out, "!{p}"),
        Formula::Or(a, b) => {
            if ctx > 1 {
                write!(out, "(")?;
            }
            write_formula(out, a, sig, 1)?;
            write!(out, " | ")?;
            write_formula(out, b, sig, 2)?;
            if ctx > 1 {
                write!(out, ")")?;
            }
            Ok(())
        }
        Formula::And(a, b) => {
            if ctx > 2 {
                write!(out, "(")?;
            }
            write_formula(out, a, sig, 2)?;
            write!(out, " & ")?;
            write_formula(out, b, sig, 3)?;
            if ctx > 2 {
                write!(out, ")")?;
            }
            Ok(())
        }
        Formula::Box(m, a) | Formula::Diamond(m, a) => {
            let (open, close) = if matches!(f, Formula::Box(..)) { ('[', ']') } else { ('<', '>') };
            write!(out, "{open}")?;
            write_modality(out, m, sig)?;
            write!(out, "{close} ")?;
            write_formula(out, a, sig, 3)
        }
        Formula::Mu(x, a) | Formula::Nu(x, a) => {
            let kw = if matches!(f, Formula::Mu(..)) { "mu" } else { "nu" };
            if ctx > 0 {
                write!(out, "(")?;
            }
            write!(out, "{kw} {x}. ")?;
            write_formula(out, a, sig, 0)?;
            if ctx > 0 {
                write!(out, ")")?;
            }
            Ok(())
        }
    }
}
