use std::fmt;

use super::ast::{Connective, Formula, Term};

impl Connective {
    pub fn symbol(self) -> &'static str {
        match self {
            Connective::And => "∧",
            Connective::Or => "∨",
            Connective::Implies => "→",
            Connective::Iff => "↔",
            Connective::Xor => "⊕",
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// Quantifiers take maximal scope when parsed, so one appearing as an operand
// has to be wrapped to keep the round trip exact.
fn write_operand(out: &mut fmt::Formatter<'_>, f: &Formula) -> fmt::Result {
    if f.is_quantifier() {
        write!(out, "({f})")
    } else {
        write!(out, "{f}")
    }
}

/// Canonical rendering: every binary connective is parenthesized, Unicode
/// symbols throughout.
impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { predicate, args } => {
                out.write_str(predicate)?;
                if !args.is_empty() {
                    out.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.write_str(", ")?;
                        }
                        write!(out, "{a}")?;
                    }
                    out.write_str(")")?;
                }
                Ok(())
            }
            Formula::Not(g) => {
                out.write_str("¬")?;
                write_operand(out, g)
            }
            Formula::ForAll(v, g) => write!(out, "∀{v} {g}"),
            Formula::Exists(v, g) => write!(out, "∃{v} {g}"),
            _ => {
                let (op, a, b) = self.as_binary().expect("binary");
                out.write_str("(")?;
                write_operand(out, a)?;
                write!(out, " {} ", op.symbol())?;
                write_operand(out, b)?;
                out.write_str(")")
            }
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}
