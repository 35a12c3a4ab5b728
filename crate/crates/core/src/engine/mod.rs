//! Entailment checking by refutation. The internal backend Skolemizes,
//! grounds over the Herbrand universe and runs DPLL; the external backend
//! hands a TPTP problem to an ATP process.

mod clausify;
mod external;
mod ground;
mod sat;

pub use clausify::{clausify, Clause, ClauseSet, FoTerm, Literal};
pub use external::command_line;
pub use ground::{
    ground, herbrand_universe, GroundAtom, GroundClause, GroundLiteral, GroundingBudgetExceeded,
};
pub use sat::{sat, sat_with_deadline, SatResult};

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fol::{signature_of, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Internal,
    External,
}

impl FromStr for Backend {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "internal" => Ok(Backend::Internal),
            "external" => Ok(Backend::External),
            _ => Err(ConfigError(format!(
                "unknown engine `{s}` (expected internal or external)"
            ))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Internal => "internal",
            Backend::External => "external",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid engine configuration: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub backend: Backend,
    pub prover_command: Option<String>,
    pub timeout_ms: u64,
    pub skolem_depth_bound: usize,
    pub max_ground_clauses: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            backend: Backend::Internal,
            prover_command: None,
            timeout_ms: 10_000,
            skolem_depth_bound: 1,
            max_ground_clauses: 200_000,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.timeout_ms == 0 {
            return Err(ConfigError("timeout_ms must be positive".into()));
        }
        if self.max_ground_clauses == 0 {
            return Err(ConfigError("max_ground_clauses must be positive".into()));
        }
        if self.backend == Backend::External
            && self
                .prover_command
                .as_deref()
                .is_none_or(|c| c.trim().is_empty())
        {
            return Err(ConfigError(
                "external backend requires a prover command".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutcomeKind {
    Entailed,
    NotEntailed,
    Indeterminate,
    EngineError,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntailmentOutcome {
    pub kind: OutcomeKind,
    pub detail: String,
    pub resource_limited: bool,
}

impl EntailmentOutcome {
    fn new(kind: OutcomeKind, detail: impl Into<String>) -> Self {
        EntailmentOutcome {
            kind,
            detail: detail.into(),
            resource_limited: false,
        }
    }

    pub(crate) fn error(detail: impl Into<String>) -> Self {
        Self::new(OutcomeKind::EngineError, detail)
    }

    pub fn is_entailed(&self) -> bool {
        self.kind == OutcomeKind::Entailed
    }
}

/// Decide whether `axioms` entail `conjecture` by refuting
/// `axioms ∪ {¬conjecture}`.
pub fn check_entailment(
    axioms: &[Formula],
    conjecture: &Formula,
    cfg: &EngineConfig,
) -> EntailmentOutcome {
    if let Err(e) = cfg.validate() {
        return EntailmentOutcome::error(e.to_string());
    }
    if let Some(open) = axioms
        .iter()
        .chain(std::iter::once(conjecture))
        .find(|f| !f.is_closed())
    {
        return EntailmentOutcome::error(format!("formula `{open}` is not closed"));
    }
    match cfg.backend {
        Backend::Internal => check_internal(axioms, conjecture, cfg),
        Backend::External => external::check(
            axioms,
            conjecture,
            cfg.prover_command.as_deref().unwrap_or_default(),
            cfg.timeout_ms,
        ),
    }
}

fn check_internal(
    axioms: &[Formula],
    conjecture: &Formula,
    cfg: &EngineConfig,
) -> EntailmentOutcome {
    let deadline = Instant::now() + Duration::from_millis(cfg.timeout_ms);
    let mut fs = axioms.to_vec();
    fs.push(Formula::not(conjecture.clone()));
    let sig = match signature_of(&fs) {
        Ok(s) => s,
        Err(e) => return EntailmentOutcome::error(e.to_string()),
    };
    let cs = clausify(&fs);
    let bound = if cs.has_skolem_functions() {
        cfg.skolem_depth_bound
    } else {
        0
    };
    for depth in 0..=bound {
        let clauses = match ground(&cs, &sig, depth, cfg.max_ground_clauses) {
            Ok(c) => c,
            Err(e) => return EntailmentOutcome::error(e.to_string()),
        };
        match sat_with_deadline(&clauses, Some(deadline)) {
            None => {
                return EntailmentOutcome {
                    kind: OutcomeKind::Indeterminate,
                    detail: format!("search exceeded {} ms", cfg.timeout_ms),
                    resource_limited: true,
                }
            }
            Some(SatResult::Unsatisfiable) => {
                return EntailmentOutcome::new(
                    OutcomeKind::Entailed,
                    format!(
                        "refuted over {} ground clauses at depth {depth}",
                        clauses.len()
                    ),
                )
            }
            Some(SatResult::Satisfiable(_)) if !cs.has_skolem_functions() => {
                return EntailmentOutcome::new(
                    OutcomeKind::NotEntailed,
                    format!("countermodel over {} ground clauses", clauses.len()),
                )
            }
            Some(SatResult::Satisfiable(_)) => {}
        }
    }
    EntailmentOutcome::new(
        OutcomeKind::Indeterminate,
        format!("satisfiable at Skolem depth bound {bound}"),
    )
}
