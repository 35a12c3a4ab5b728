use thiserror::Error;

use super::client::{chat_request_body, ChatClient, ChatRequest};
use super::prompt::{parse_llm_output, PromptTemplate};
use crate::engine::EngineConfig;
use crate::fol::Formula;
use crate::metrics::{logical_equivalence, EquivalenceError, ExecutionRecord};
use crate::verifier::{Diagnostic, Instance, TriLabel, Verifier, VerifyError};

pub const MAX_ATTEMPTS: usize = 3;

/// A task in natural language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NlInstance {
    pub id: String,
    pub premises: Vec<String>,
    pub conclusion: String,
    pub label: bool,
    pub steps: Vec<String>,
    pub answer: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationResult {
    /// Normalized instance built from the accepted attempt.
    pub instance: Instance,
    /// Formulas as the model wrote them, before normalization.
    pub premise_fols: Vec<Formula>,
    pub step_fols: Vec<Formula>,
    pub conclusion_fol: Formula,
    pub attempts_used: usize,
    pub raw_llm_outputs: Vec<String>,
    pub first_attempt: ExecutionRecord,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("translation failed after {attempts} attempt(s): {}", reasons.join("; "))]
pub struct TranslationFailed {
    pub attempts: usize,
    pub reasons: Vec<String>,
    pub raw_llm_outputs: Vec<String>,
    pub first_attempt: ExecutionRecord,
}

enum AttemptError {
    NotExecuted(String),
    Mismatch(String),
}

const NOT_EXECUTED: ExecutionRecord = ExecutionRecord {
    executed: false,
    conclusion_matches: None,
};

/// Translate an instance with at most [`MAX_ATTEMPTS`] requests. Every
/// request carries the same prompt; earlier outputs are never fed back.
pub fn translate(
    nl: &NlInstance,
    client: &dyn ChatClient,
    template: &PromptTemplate,
    verifier: &Verifier,
) -> Result<TranslationResult, TranslationFailed> {
    let prompt = template
        .render(&nl.premises, &nl.steps, &nl.conclusion)
        .map_err(|e| TranslationFailed {
            attempts: 0,
            reasons: vec![e.to_string()],
            raw_llm_outputs: Vec::new(),
            first_attempt: NOT_EXECUTED,
        })?;
    let request = ChatRequest {
        instance_id: nl.id.clone(),
        body: chat_request_body(client.model_name(), client.temperature(), &prompt),
    };
    let mut raw_llm_outputs = Vec::new();
    let mut reasons = Vec::new();
    let mut first_attempt = None;
    for attempt in 1..=MAX_ATTEMPTS {
        let outcome = match client.complete(&request) {
            Err(e) => Err(AttemptError::NotExecuted(e.to_string())),
            Ok(text) => {
                raw_llm_outputs.push(text.clone());
                attempt_once(nl, &text, verifier)
            }
        };
        let record = match &outcome {
            Ok(_) => ExecutionRecord {
                executed: true,
                conclusion_matches: Some(true),
            },
            Err(AttemptError::Mismatch(_)) => ExecutionRecord {
                executed: true,
                conclusion_matches: Some(false),
            },
            Err(AttemptError::NotExecuted(_)) => NOT_EXECUTED,
        };
        let first = *first_attempt.get_or_insert(record);
        match outcome {
            Ok(mut result) => {
                for (i, r) in reasons.iter().enumerate() {
                    result.diagnostics.push(Diagnostic::new(
                        "regenerated",
                        format!("attempt {} failed: {r}", i + 1),
                    ));
                }
                result.attempts_used = attempt;
                result.raw_llm_outputs = raw_llm_outputs;
                result.first_attempt = first;
                return Ok(result);
            }
            Err(AttemptError::NotExecuted(r)) | Err(AttemptError::Mismatch(r)) => reasons.push(r),
        }
    }
    Err(TranslationFailed {
        attempts: MAX_ATTEMPTS,
        reasons,
        raw_llm_outputs,
        first_attempt: first_attempt.unwrap_or(NOT_EXECUTED),
    })
}

fn attempt_once(
    nl: &NlInstance,
    text: &str,
    verifier: &Verifier,
) -> Result<TranslationResult, AttemptError> {
    let parsed = parse_llm_output(text, nl.premises.len(), nl.steps.len() + 1)
        .map_err(|e| AttemptError::NotExecuted(e.to_string()))?;
    let mut step_fols = parsed.conclusions;
    let conclusion_fol = step_fols.pop().expect("at least the conclusion");
    let instance = Instance::new(
        nl.id.clone(),
        parsed.premises.clone(),
        conclusion_fol.clone(),
        nl.label,
        step_fols.clone(),
        nl.answer,
    )
    .map_err(|e| AttemptError::NotExecuted(e.to_string()))?;
    let expected = TriLabel::from_bool(nl.label);
    match verifier.verify_single_statement(&instance.premises, &instance.conclusion) {
        Ok(l) if l == expected => {}
        Ok(l) => {
            return Err(AttemptError::Mismatch(format!(
                "conclusion verifies as {l} but the label is {expected}"
            )))
        }
        Err(e @ VerifyError::Engine(_)) => return Err(AttemptError::NotExecuted(e.to_string())),
        Err(e) => return Err(AttemptError::Mismatch(e.to_string())),
    }
    let diagnostics = parsed
        .repairs
        .into_iter()
        .map(|(line, what)| Diagnostic::new("repaired", format!("{line}: {what}")))
        .collect();
    Ok(TranslationResult {
        instance,
        premise_fols: parsed.premises,
        step_fols,
        conclusion_fol,
        attempts_used: 0,
        raw_llm_outputs: Vec::new(),
        first_attempt: NOT_EXECUTED,
        diagnostics,
    })
}

/// Indices of steps to keep: the first of every group of logically
/// equivalent formulas. Pairs the engine cannot decide are kept apart.
pub fn dedup_steps(steps: &[Formula], cfg: &EngineConfig) -> Result<Vec<usize>, EquivalenceError> {
    let mut kept: Vec<usize> = Vec::new();
    'outer: for (i, s) in steps.iter().enumerate() {
        for &k in &kept {
            match logical_equivalence(&steps[k], s, cfg) {
                Ok(true) => continue 'outer,
                Ok(false) | Err(EquivalenceError::Undecided(_)) => {}
                Err(e) => return Err(e),
            }
        }
        kept.push(i);
    }
    Ok(kept)
}
