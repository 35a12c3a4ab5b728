//! TPTP FOF emission, pre-parse repair of raw FOL strings, and SZS status
//! parsing.

use std::fmt::Write as _;

use thiserror::Error;

use crate::fol::{parse_formula, Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TptpError {
    #[error("`{0}` is not a valid TPTP lower_word")]
    InvalidName(String),
    #[error("formula is not normalized: {0}")]
    UnnormalizedFormula(String),
    #[error("formula has free variable `{0}`")]
    OpenFormula(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Axiom,
    Conjecture,
}

impl Role {
    fn as_str(self) -> &'static str {
        match self {
            Role::Axiom => "axiom",
            Role::Conjecture => "conjecture",
        }
    }
}

/// Axioms named `premise_<i>` (1-based) and an optional conjecture named
/// `conclusion`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TptpProblem {
    pub axioms: Vec<(String, Formula)>,
    pub conjecture: Option<(String, Formula)>,
}

impl TptpProblem {
    pub fn new(premises: &[Formula], conclusion: Option<&Formula>) -> Self {
        TptpProblem {
            axioms: premises
                .iter()
                .enumerate()
                .map(|(i, f)| (format!("premise_{}", i + 1), f.clone()))
                .collect(),
            conjecture: conclusion.map(|c| ("conclusion".to_string(), c.clone())),
        }
    }
}

pub fn is_lower_word(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Emitter {
    vars: Vec<(String, String)>,
    next: usize,
}

impl Emitter {
    fn functor(name: &str) -> Result<&str, TptpError> {
        if is_lower_word(name) {
            Ok(name)
        } else {
            Err(TptpError::UnnormalizedFormula(format!(
                "symbol `{name}` is not lowercase ASCII"
            )))
        }
    }

    fn operand(&mut self, out: &mut String, f: &Formula) -> Result<(), TptpError> {
        if f.is_quantifier() {
            out.push('(');
            self.formula(out, f)?;
            out.push(')');
            Ok(())
        } else {
            self.formula(out, f)
        }
    }

    fn formula(&mut self, out: &mut String, f: &Formula) -> Result<(), TptpError> {
        match f {
            Formula::Atom { predicate, args } => {
                out.push_str(Self::functor(predicate)?);
                if !args.is_empty() {
                    out.push('(');
                    for (i, t) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        match t {
                            Term::Constant(c) => out.push_str(Self::functor(c)?),
                            Term::Variable(v) => {
                                let renamed = self
                                    .vars
                                    .iter()
                                    .rev()
                                    .find(|(src, _)| src == v)
                                    .map(|(_, dst)| dst.clone())
                                    .ok_or_else(|| TptpError::OpenFormula(v.clone()))?;
                                out.push_str(&renamed);
                            }
                        }
                    }
                    out.push(')');
                }
                Ok(())
            }
            Formula::Not(g) => {
                out.push('~');
                self.operand(out, g)
            }
            Formula::ForAll(v, g) | Formula::Exists(v, g) => {
                self.next += 1;
                let renamed = format!("X{}", self.next);
                let q = if matches!(f, Formula::ForAll(..)) {
                    '!'
                } else {
                    '?'
                };
                let _ = write!(out, "{q}[{renamed}]: ");
                self.vars.push((v.clone(), renamed));
                let res = self.formula(out, g);
                self.vars.pop();
                res
            }
            Formula::Iff(..) | Formula::Xor(..) => Err(TptpError::UnnormalizedFormula(
                "`↔` or `⊕` must be eliminated before emission".into(),
            )),
            _ => {
                let (op, a, b) = f.as_binary().expect("binary");
                let sym = match op {
                    crate::fol::Connective::And => "&",
                    crate::fol::Connective::Or => "|",
                    crate::fol::Connective::Implies => "=>",
                    _ => unreachable!(),
                };
                out.push('(');
                self.operand(out, a)?;
                let _ = write!(out, " {sym} ");
                self.operand(out, b)?;
                out.push(')');
                Ok(())
            }
        }
    }
}

/// Render the body of a formula in TPTP FOF syntax. Variables are renamed
/// `X1`, `X2`, ... in the order their quantifiers are emitted.
pub fn fof_formula(f: &Formula) -> Result<String, TptpError> {
    let mut out = String::new();
    Emitter {
        vars: Vec::new(),
        next: 0,
    }
    .formula(&mut out, f)?;
    Ok(out)
}

pub fn to_fof_line(name: &str, role: Role, f: &Formula) -> Result<String, TptpError> {
    if !is_lower_word(name) {
        return Err(TptpError::InvalidName(name.to_string()));
    }
    Ok(format!(
        "fof({name}, {}, {}).",
        role.as_str(),
        fof_formula(f)?
    ))
}

pub fn emit_problem(p: &TptpProblem) -> Result<String, TptpError> {
    let mut lines = Vec::with_capacity(p.axioms.len() + 1);
    for (name, f) in &p.axioms {
        lines.push(to_fof_line(name, Role::Axiom, f)?);
    }
    if let Some((name, f)) = &p.conjecture {
        lines.push(to_fof_line(name, Role::Conjecture, f)?);
    }
    let mut doc = lines.join("\n");
    doc.push('\n');
    Ok(doc)
}

/// One bounded rewrite applied by [`repair_logged`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepairAction {
    CollapsedDoubledConnective,
    ArrowAlias,
    CaretAsConjunction,
    InfixVAsDisjunction,
    AppendedParens(usize),
    StrippedParens(usize),
}

impl RepairAction {
    pub fn describe(&self) -> String {
        match self {
            RepairAction::CollapsedDoubledConnective => "collapsed doubled connective".into(),
            RepairAction::ArrowAlias => "rewrote `<=>`/`=>` arrow".into(),
            RepairAction::CaretAsConjunction => "rewrote `^` as `∧`".into(),
            RepairAction::InfixVAsDisjunction => "rewrote infix `v` as `∨`".into(),
            RepairAction::AppendedParens(n) => format!("appended {n} closing parenthesis(es)"),
            RepairAction::StrippedParens(n) => format!("stripped {n} trailing parenthesis(es)"),
        }
    }
}

const MAX_PAREN_FIX: usize = 2;

fn replace_to_fixpoint(s: &mut String, from: &str, to: &str) -> bool {
    let mut changed = false;
    while s.contains(from) {
        *s = s.replace(from, to);
        changed = true;
    }
    changed
}

/// Best-effort syntax repair. Input that already parses is returned as is;
/// otherwise a fixed list of rewrites is applied and every applied rewrite
/// is reported.
pub fn repair_logged(text: &str) -> (String, Vec<RepairAction>) {
    if parse_formula(text).is_ok() {
        return (text.to_string(), Vec::new());
    }
    let mut s = text.to_string();
    let mut applied = Vec::new();

    if s.contains("<=>") || s.contains("=>") {
        s = s.replace("<=>", "↔").replace("=>", "→");
        applied.push(RepairAction::ArrowAlias);
    }
    if s.contains('^') {
        s = s.replace('^', "∧");
        applied.push(RepairAction::CaretAsConjunction);
    }
    let mut doubled = false;
    for (from, to) in [("&&", "&"), ("||", "|"), ("∧∧", "∧"), ("∨∨", "∨")] {
        doubled |= replace_to_fixpoint(&mut s, from, to);
    }
    if doubled {
        applied.push(RepairAction::CollapsedDoubledConnective);
    }
    if replace_to_fixpoint(&mut s, " v ", " ∨ ") {
        applied.push(RepairAction::InfixVAsDisjunction);
    }

    let open = s.chars().filter(|&c| c == '(').count();
    let close = s.chars().filter(|&c| c == ')').count();
    if open > close && open - close <= MAX_PAREN_FIX {
        let n = open - close;
        s = s.trim_end().to_string();
        s.extend(std::iter::repeat_n(')', n));
        applied.push(RepairAction::AppendedParens(n));
    } else if close > open && close - open <= MAX_PAREN_FIX {
        let n = close - open;
        let trimmed = s.trim_end();
        let trailing = trimmed.chars().rev().take_while(|&c| c == ')').count();
        if trailing >= n {
            let keep = trimmed.len() - n;
            s = trimmed[..keep].to_string();
            applied.push(RepairAction::StrippedParens(n));
        }
    }
    (s, applied)
}

pub fn repair(text: &str) -> String {
    repair_logged(text).0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SzsStatus {
    Theorem,
    ContradictoryAxioms,
    Unsatisfiable,
    CounterSatisfiable,
    Satisfiable,
    Timeout,
    GaveUp,
    Error,
    Unparsed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SzsOutcome {
    pub status: SzsStatus,
    pub raw_line: String,
}

/// Read the first `SZS status <word>` line from prover output.
pub fn parse_szs(output: &str) -> SzsOutcome {
    for line in output.lines() {
        let Some(pos) = line.find("SZS status") else {
            continue;
        };
        let word = line[pos + "SZS status".len()..]
            .split_whitespace()
            .next()
            .unwrap_or("");
        let status = match word {
            "Theorem" => SzsStatus::Theorem,
            "ContradictoryAxioms" => SzsStatus::ContradictoryAxioms,
            "Unsatisfiable" => SzsStatus::Unsatisfiable,
            "CounterSatisfiable" => SzsStatus::CounterSatisfiable,
            "Satisfiable" => SzsStatus::Satisfiable,
            "Timeout" => SzsStatus::Timeout,
            "GaveUp" | "ResourceOut" | "MemoryOut" | "Incomplete" | "Unknown" => SzsStatus::GaveUp,
            _ => SzsStatus::Error,
        };
        return SzsOutcome {
            status,
            raw_line: line.to_string(),
        };
    }
    SzsOutcome {
        status: SzsStatus::Unparsed,
        raw_line: String::new(),
    }
}
