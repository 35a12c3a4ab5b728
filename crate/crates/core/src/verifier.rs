//! Single-statement verification, per-step labeling, proof-path
//! construction and chain classification.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::batch;
use crate::engine::{check_entailment, EngineConfig, OutcomeKind};
use crate::fol::{normalize_all, parse_formula, signature_of, FolError, Formula, NameMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TriLabel {
    True,
    False,
    Unknown,
}

impl TriLabel {
    pub const ALL: [TriLabel; 3] = [TriLabel::True, TriLabel::False, TriLabel::Unknown];

    pub fn from_bool(b: bool) -> Self {
        if b {
            TriLabel::True
        } else {
            TriLabel::False
        }
    }

    pub fn is_erroneous(self) -> bool {
        self != TriLabel::True
    }
}

impl fmt::Display for TriLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriLabel::True => "True",
            TriLabel::False => "False",
            TriLabel::Unknown => "Unknown",
        })
    }
}

impl FromStr for TriLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "True" => Ok(TriLabel::True),
            "False" => Ok(TriLabel::False),
            "Unknown" => Ok(TriLabel::Unknown),
            _ => Err(format!("`{s}` is not True, False or Unknown")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    T1,
    T2,
    T3,
    T4,
    F1,
    F2,
    Error,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::T1,
        Category::T2,
        Category::T3,
        Category::T4,
        Category::F1,
        Category::F2,
        Category::Error,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    #[default]
    Lenient,
    Strict,
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lenient" => Ok(Policy::Lenient),
            "strict" => Ok(Policy::Strict),
            _ => Err(format!("unknown policy `{s}` (expected lenient or strict)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            code: code.to_string(),
            message: message.into(),
        }
    }
}

/// Natural-language sentences parallel to the formal fields.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceText {
    pub premises: Vec<String>,
    pub conclusion: String,
    pub steps: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("an instance needs at least one premise")]
    NoPremises,
    #[error("{field}: {source}")]
    Formula {
        field: String,
        #[source]
        source: FolError,
    },
    #[error(transparent)]
    Normalize(FolError),
}

/// One task: premises, conclusion, label, reasoning steps and answer, all
/// normalized against a shared name map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub label: bool,
    pub steps: Vec<Formula>,
    pub answer: bool,
    pub source_text: Option<SourceText>,
    pub names: NameMap,
}

impl Instance {
    pub fn new(
        id: impl Into<String>,
        premises: Vec<Formula>,
        conclusion: Formula,
        label: bool,
        steps: Vec<Formula>,
        answer: bool,
    ) -> Result<Self, InstanceError> {
        if premises.is_empty() {
            return Err(InstanceError::NoPremises);
        }
        let n = premises.len();
        let m = steps.len();
        let mut all = premises;
        all.push(conclusion);
        all.extend(steps);
        let (mut all, names) = normalize_all(&all).map_err(InstanceError::Normalize)?;
        signature_of(&all).map_err(InstanceError::Normalize)?;
        let steps = all.split_off(n + 1);
        debug_assert_eq!(steps.len(), m);
        let conclusion = all.pop().expect("conclusion present");
        Ok(Instance {
            id: id.into(),
            premises: all,
            conclusion,
            label,
            steps,
            answer,
            source_text: None,
            names,
        })
    }

    /// Parse surface FOL strings and build a normalized instance.
    pub fn parse(
        id: impl Into<String>,
        premises: &[&str],
        conclusion: &str,
        label: bool,
        steps: &[&str],
        answer: bool,
    ) -> Result<Self, InstanceError> {
        let parse_all = |field: &str, xs: &[&str]| -> Result<Vec<Formula>, InstanceError> {
            xs.iter()
                .enumerate()
                .map(|(i, s)| {
                    parse_formula(s).map_err(|source| InstanceError::Formula {
                        field: format!("{field}[{i}]"),
                        source,
                    })
                })
                .collect()
        };
        let p = parse_all("premises", premises)?;
        let c = parse_formula(conclusion).map_err(|source| InstanceError::Formula {
            field: "conclusion".into(),
            source,
        })?;
        let s = parse_all("steps", steps)?;
        Instance::new(id, p, c, label, s, answer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("contradictory premises")]
    Contradiction,
    #[error("conclusion verifies as {found} but the label is {expected}")]
    LabelMismatch { expected: TriLabel, found: TriLabel },
    #[error("engine error: {0}")]
    Engine(String),
    #[error("engine could not decide: {0}")]
    Undecided(String),
}

impl VerifyError {
    pub fn code(&self) -> &'static str {
        match self {
            VerifyError::Contradiction => "contradictory_premises",
            VerifyError::LabelMismatch { .. } => "label_mismatch",
            VerifyError::Engine(_) => "engine_error",
            VerifyError::Undecided(_) => "undecided",
        }
    }

    fn diagnostic(&self) -> Diagnostic {
        Diagnostic::new(self.code(), self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub step_labels: Vec<TriLabel>,
    pub answer_correct: Option<bool>,
    pub proof_path: Vec<usize>,
    pub has_valid_proof_path: Option<bool>,
    pub category: Category,
    pub diagnostics: Vec<Diagnostic>,
}

impl VerificationReport {
    pub fn error(id: impl Into<String>, diagnostics: Vec<Diagnostic>) -> Self {
        VerificationReport {
            id: id.into(),
            step_labels: Vec::new(),
            answer_correct: None,
            proof_path: Vec::new(),
            has_valid_proof_path: None,
            category: Category::Error,
            diagnostics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepVerification {
    pub answer_correct: bool,
    pub step_labels: Vec<TriLabel>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathVerification {
    pub has_valid_proof_path: bool,
    pub proof_path: Vec<usize>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Default)]
pub struct Verifier {
    pub engine: EngineConfig,
    pub policy: Policy,
}

impl Verifier {
    pub fn new(engine: EngineConfig, policy: Policy) -> Self {
        Verifier { engine, policy }
    }

    fn entails(
        &self,
        p: &[Formula],
        s: &Formula,
        diags: &mut Vec<Diagnostic>,
    ) -> Result<bool, VerifyError> {
        let out = check_entailment(p, s, &self.engine);
        match out.kind {
            OutcomeKind::Entailed => Ok(true),
            OutcomeKind::NotEntailed => Ok(false),
            OutcomeKind::Indeterminate => {
                if self.policy == Policy::Strict {
                    return Err(VerifyError::Undecided(out.detail));
                }
                let code = if out.resource_limited {
                    "resource_limited"
                } else {
                    "depth_bound"
                };
                diags.push(Diagnostic::new(code, format!("{s}: {}", out.detail)));
                Ok(false)
            }
            OutcomeKind::EngineError => Err(VerifyError::Engine(out.detail)),
        }
    }

    fn single(
        &self,
        p: &[Formula],
        s: &Formula,
        diags: &mut Vec<Diagnostic>,
    ) -> Result<TriLabel, VerifyError> {
        let neg = Formula::not(s.clone());
        let ((pos, mut d1), (negd, d2)) = batch::join(
            || {
                let mut d = Vec::new();
                (self.entails(p, s, &mut d), d)
            },
            || {
                let mut d = Vec::new();
                (self.entails(p, &neg, &mut d), d)
            },
        );
        d1.extend(d2);
        diags.extend(d1);
        match (pos?, negd?) {
            (true, true) => Err(VerifyError::Contradiction),
            (true, false) => Ok(TriLabel::True),
            (false, true) => Ok(TriLabel::False),
            (false, false) => Ok(TriLabel::Unknown),
        }
    }

    /// Three-valued verdict of `s` against `p`; entailment of both `s` and
    /// `¬s` is reported as a contradiction.
    pub fn verify_single_statement(
        &self,
        p: &[Formula],
        s: &Formula,
    ) -> Result<TriLabel, VerifyError> {
        self.single(p, s, &mut Vec::new())
    }

    /// Check the conclusion against the label, then label every step against
    /// the premises.
    pub fn verify_reasoning_steps(&self, inst: &Instance) -> Result<StepVerification, VerifyError> {
        let mut diagnostics = Vec::new();
        let expected = TriLabel::from_bool(inst.label);
        let found = self.single(&inst.premises, &inst.conclusion, &mut diagnostics)?;
        if found != expected {
            return Err(VerifyError::LabelMismatch { expected, found });
        }
        let per_step = batch::par_map(&inst.steps, |s| {
            let mut d = Vec::new();
            (self.single(&inst.premises, s, &mut d), d)
        });
        let mut step_labels = Vec::with_capacity(per_step.len());
        for (label, d) in per_step {
            step_labels.push(label?);
            diagnostics.extend(d);
        }
        Ok(StepVerification {
            answer_correct: inst.label == inst.answer,
            step_labels,
            diagnostics,
        })
    }

    /// Greedy in-order proof path: a True step joins the path when the path
    /// so far leaves it Unknown.
    pub fn verify_proof_path(
        &self,
        inst: &Instance,
        step_labels: &[TriLabel],
    ) -> Result<PathVerification, VerifyError> {
        let mut diagnostics = Vec::new();
        let mut path: Vec<usize> = Vec::new();
        let mut formulas: Vec<Formula> = Vec::new();
        for (i, (step, label)) in inst.steps.iter().zip(step_labels).enumerate() {
            if *label != TriLabel::True {
                continue;
            }
            match self.single(&formulas, step, &mut diagnostics) {
                Ok(TriLabel::Unknown) => {
                    path.push(i);
                    formulas.push(step.clone());
                }
                Ok(TriLabel::True) => {}
                Ok(TriLabel::False) => diagnostics.push(Diagnostic::new(
                    "path_conflict",
                    format!("step {i} is refuted by the proof path; skipped"),
                )),
                Err(VerifyError::Contradiction) => diagnostics.push(Diagnostic::new(
                    "path_conflict",
                    format!("proof path is inconsistent at step {i}; skipped"),
                )),
                Err(e) => return Err(e),
            }
        }
        let expected = TriLabel::from_bool(inst.label);
        let has_valid_proof_path = match self.single(&formulas, &inst.conclusion, &mut diagnostics)
        {
            Ok(l) => l == expected,
            Err(VerifyError::Contradiction) => {
                diagnostics.push(Diagnostic::new(
                    "path_conflict",
                    "proof path is inconsistent",
                ));
                false
            }
            Err(e) => return Err(e),
        };
        Ok(PathVerification {
            has_valid_proof_path,
            proof_path: path,
            diagnostics,
        })
    }

    pub fn verify_instance(&self, inst: &Instance) -> VerificationReport {
        let steps = match self.verify_reasoning_steps(inst) {
            Ok(s) => s,
            Err(e) => return VerificationReport::error(&inst.id, vec![e.diagnostic()]),
        };
        let path = match self.verify_proof_path(inst, &steps.step_labels) {
            Ok(p) => p,
            Err(e) => {
                let mut d = steps.diagnostics;
                d.push(e.diagnostic());
                return VerificationReport::error(&inst.id, d);
            }
        };
        let category = classify_chain(
            steps.answer_correct,
            &steps.step_labels,
            path.has_valid_proof_path,
        );
        let mut diagnostics = steps.diagnostics;
        diagnostics.extend(path.diagnostics);
        VerificationReport {
            id: inst.id.clone(),
            step_labels: steps.step_labels,
            answer_correct: Some(steps.answer_correct),
            proof_path: path.proof_path,
            has_valid_proof_path: Some(path.has_valid_proof_path),
            category,
            diagnostics,
        }
    }
}

pub fn classify_chain(
    answer_correct: bool,
    step_labels: &[TriLabel],
    has_valid_proof_path: bool,
) -> Category {
    let all_true = step_labels.iter().all(|l| !l.is_erroneous());
    match (answer_correct, all_true, has_valid_proof_path) {
        (false, true, _) => Category::F1,
        (false, false, _) => Category::F2,
        (true, true, true) => Category::T1,
        (true, false, true) => Category::T2,
        (true, true, false) => Category::T3,
        (true, false, false) => Category::T4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use TriLabel::{False as F, True as T, Unknown as U};

    const LEO_PREMISES: [&str; 2] = [
        "∀x (pet(x) → animal(x))",
        "pet(leo) ∧ dog(leo) ∧ naughty(leo) ∧ haspet(charlie, leo)",
    ];

    fn leo(s3: &str) -> Instance {
        Instance::parse(
            "leo",
            &LEO_PREMISES,
            "animal(leo)",
            true,
            &[
                LEO_PREMISES[0],
                LEO_PREMISES[1],
                s3,
                "∀x ((pet(x) ∧ animal(x)) → (pet(leo) → animal(leo)))",
            ],
            true,
        )
        .unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn leo_report() {
        let r = Verifier::default().verify_instance(&leo("∀x (dog(x) → pet(x))"));
        assert_eq!(r.step_labels, vec![T, T, U, T]);
        assert_eq!(r.answer_correct, Some(true));
        assert_eq!(r.proof_path, vec![0, 1]);
        assert_eq!(r.has_valid_proof_path, Some(true));
        assert_eq!(r.category, Category::T2);
    }

    #[test]
    fn leo_corrected() {
        let r = Verifier::default().verify_instance(&leo("∀x ((pet(x) ∧ dog(x)) → pet(x))"));
        assert_eq!(r.step_labels, vec![T, T, T, T]);
        assert_eq!(r.category, Category::T1);
    }

    #[test]
    fn single_statement() {
        let v = Verifier::default();
        assert_eq!(v.verify_single_statement(&[f("p(a)")], &f("¬p(a)")), Ok(F));
        assert_eq!(
            v.verify_single_statement(&[f("p(a)"), f("¬p(a)")], &f("q(a)")),
            Err(VerifyError::Contradiction)
        );
        let p: Vec<_> = LEO_PREMISES.iter().map(|s| f(s)).collect();
        assert_eq!(
            v.verify_single_statement(&p, &f("∀x (dog(x) → pet(x))")),
            Ok(U)
        );
        assert_eq!(v.verify_single_statement(&[], &f("p(a) ∨ ¬p(a)")), Ok(T));
    }

    #[test]
    fn label_mismatch() {
        let inst = Instance::parse("x", &["p(a)"], "q(a)", true, &[], true).unwrap();
        assert_eq!(
            Verifier::default().verify_reasoning_steps(&inst),
            Err(VerifyError::LabelMismatch {
                expected: T,
                found: U
            })
        );
        let r = Verifier::default().verify_instance(&inst);
        assert_eq!(r.category, Category::Error);
        assert_eq!(r.diagnostics[0].code, "label_mismatch");
    }

    #[test]
    fn contradictory_premises() {
        let inst = Instance::parse("x", &["p(a)", "¬p(a)"], "p(a)", true, &[], true).unwrap();
        let r = Verifier::default().verify_instance(&inst);
        assert_eq!(r.category, Category::Error);
        assert_eq!(r.diagnostics[0].message, "contradictory premises");
    }

    #[test]
    fn wrong_answer() {
        let inst = Instance::parse("x", &["p(a)"], "p(a)", true, &["p(a)"], false).unwrap();
        let r = Verifier::default().verify_instance(&inst);
        assert_eq!(r.step_labels, vec![T]);
        assert_eq!(r.category, Category::F1);
    }

    #[test]
    fn unknown_steps_give_empty_path() {
        let inst = Instance::parse(
            "x",
            &["p(a)", "∀x (p(x) → q(x))"],
            "q(a)",
            true,
            &["r(a)", "r(b)"],
            true,
        )
        .unwrap();
        let v = Verifier::default();
        let steps = v.verify_reasoning_steps(&inst).unwrap();
        assert_eq!(steps.step_labels, vec![U, U]);
        let path = v.verify_proof_path(&inst, &steps.step_labels).unwrap();
        assert!(path.proof_path.is_empty());
        assert!(!path.has_valid_proof_path);
    }

    #[test]
    fn modus_ponens_chain() {
        let premises = ["p(a)", "∀x (p(x) → q(x))", "∀x (q(x) → r(x))"];
        let inst = Instance::parse("mp", &premises, "r(a)", true, &premises, true).unwrap();
        let r = Verifier::default().verify_instance(&inst);
        assert_eq!(r.proof_path, vec![0, 1, 2]);
        assert_eq!(r.category, Category::T1);
    }

    #[test]
    fn classification_table() {
        assert_eq!(classify_chain(true, &[T, T, U, T], true), Category::T2);
        assert_eq!(classify_chain(true, &[T, T, T, T], true), Category::T1);
        assert_eq!(
            classify_chain(true, &[T, T, T, T, U, T], false),
            Category::T4
        );
        assert_eq!(classify_chain(true, &[T], false), Category::T3);
        assert_eq!(classify_chain(false, &[T], true), Category::F1);
        assert_eq!(classify_chain(false, &[F], false), Category::F2);
        assert_eq!(classify_chain(true, &[], true), Category::T1);
    }

    #[test]
    fn strict_policy_escalates() {
        let inst = Instance::parse(
            "s",
            &["∀x ∃y r(x, y)", "p(a)"],
            "p(a)",
            true,
            &["r(a, a)"],
            true,
        )
        .unwrap();
        let lenient = Verifier::default().verify_instance(&inst);
        assert_eq!(lenient.step_labels, vec![U]);
        assert!(lenient.diagnostics.iter().any(|d| d.code == "depth_bound"));
        let strict = Verifier::new(EngineConfig::default(), Policy::Strict).verify_instance(&inst);
        assert_eq!(strict.category, Category::Error);
    }

    #[test]
    fn names_parse() {
        assert_eq!("T3".parse::<Category>(), Ok(Category::T3));
        assert!("T9".parse::<Category>().is_err());
        assert_eq!("Strict".parse::<Policy>(), Ok(Policy::Strict));
        assert_eq!(serde_json::to_string(&U).unwrap(), "\"Unknown\"");
    }
}
