use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::clausify::{ClauseSet, FoTerm};
use crate::fol::Signature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("grounding needs {needed} clauses, budget is {budget}")]
pub struct GroundingBudgetExceeded {
    pub needed: u128,
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<FoTerm>,
}

impl std::fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundLiteral {
    pub positive: bool,
    pub atom: GroundAtom,
}

pub type GroundClause = Vec<GroundLiteral>;

/// Herbrand terms of function-nesting depth at most `depth`.
pub fn herbrand_universe(cs: &ClauseSet, sig: &Signature, depth: usize) -> Vec<FoTerm> {
    let mut constants: BTreeSet<String> = sig.constants.iter().cloned().collect();
    constants.extend(cs.skolem_constants().map(str::to_string));
    constants.extend(cs.constants());
    if constants.is_empty() {
        let mut name = "hu0".to_string();
        let mut i = 0;
        while sig.predicates.contains_key(&name) {
            i += 1;
            name = format!("hu{i}");
        }
        constants.insert(name);
    }
    let functions: Vec<(&str, usize)> = cs
        .skolem_symbols
        .iter()
        .filter(|(_, &a)| a > 0)
        .map(|(n, &a)| (n.as_str(), a))
        .collect();

    let mut universe: BTreeSet<FoTerm> = constants.into_iter().map(FoTerm::Const).collect();
    for _ in 0..depth {
        let level: Vec<FoTerm> = universe.iter().cloned().collect();
        for &(f, arity) in &functions {
            for args in tuples(&level, arity) {
                universe.insert(FoTerm::Func(f.to_string(), args));
            }
        }
    }
    universe.into_iter().collect()
}

fn tuples(items: &[FoTerm], arity: usize) -> Vec<Vec<FoTerm>> {
    let mut out: Vec<Vec<FoTerm>> = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Instantiate every clause over the Herbrand universe at `depth`.
/// Tautological instances are dropped.
pub fn ground(
    cs: &ClauseSet,
    sig: &Signature,
    depth: usize,
    max_clauses: usize,
) -> Result<Vec<GroundClause>, GroundingBudgetExceeded> {
    let universe = herbrand_universe(cs, sig, depth);
    let n = universe.len() as u128;
    let needed: u128 = cs
        .clauses
        .iter()
        .map(|c| n.saturating_pow(c.variables().len() as u32))
        .fold(0u128, u128::saturating_add);
    if needed > max_clauses as u128 {
        return Err(GroundingBudgetExceeded {
            needed,
            budget: max_clauses,
        });
    }

    let mut out = Vec::with_capacity(needed as usize);
    for clause in &cs.clauses {
        let vars: Vec<usize> = clause.variables().into_iter().collect();
        for values in tuples(&universe, vars.len()) {
            let binding: BTreeMap<usize, FoTerm> = vars.iter().copied().zip(values).collect();
            let mut lits: Vec<GroundLiteral> = clause
                .literals
                .iter()
                .map(|l| GroundLiteral {
                    positive: l.positive,
                    atom: GroundAtom {
                        predicate: l.predicate.clone(),
                        args: l.args.iter().map(|a| a.instantiate(&binding)).collect(),
                    },
                })
                .collect();
            lits.sort();
            lits.dedup();
            let tautology = lits
                .windows(2)
                .any(|w| w[0].atom == w[1].atom && w[0].positive != w[1].positive);
            if !tautology {
                out.push(lits);
            }
        }
    }
    Ok(out)
}
