//! JSONL record types.

use serde::{Deserialize, Serialize};

use crate::fol::{parse_formula, print_formula, FolError, Formula};
use crate::metrics::ExecutionRecord;
use crate::verifier::{
    Category, Instance, InstanceError, SourceText, TriLabel, VerificationReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    True,
    False,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

impl From<Verdict> for bool {
    fn from(v: Verdict) -> Self {
        v == Verdict::True
    }
}

/// One input task. FOL fields, when present, bypass translation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    #[serde(default)]
    pub premises: Vec<String>,
    #[serde(default)]
    pub conclusion: String,
    pub label: Verdict,
    #[serde(default)]
    pub steps: Vec<String>,
    pub answer: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub premises_fol: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conclusion_fol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps_fol: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_category: Option<Category>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_step_labels: Option<Vec<TriLabel>>,
}

/// Formal fields of a record, as surface strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolFields {
    pub premises: Vec<String>,
    pub conclusion: String,
    pub steps: Vec<String>,
}

/// Premises, conclusion and steps.
pub type ParsedFol = (Vec<Formula>, Formula, Vec<Formula>);

impl FolFields {
    pub fn from_formulas(premises: &[Formula], conclusion: &Formula, steps: &[Formula]) -> Self {
        FolFields {
            premises: premises.iter().map(print_formula).collect(),
            conclusion: print_formula(conclusion),
            steps: steps.iter().map(print_formula).collect(),
        }
    }

    pub fn parse(&self) -> Result<ParsedFol, (String, FolError)> {
        let all = |field: &str, xs: &[String]| {
            xs.iter()
                .enumerate()
                .map(|(i, s)| parse_formula(s).map_err(|e| (format!("{field}[{i}]"), e)))
                .collect::<Result<Vec<_>, _>>()
        };
        Ok((
            all("premises_fol", &self.premises)?,
            parse_formula(&self.conclusion).map_err(|e| ("conclusion_fol".to_string(), e))?,
            all("steps_fol", &self.steps)?,
        ))
    }
}

impl InstanceRecord {
    /// Structural checks beyond JSON shape.
    pub fn validate(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("`id` is empty".into());
        }
        let any_fol = self.premises_fol.is_some()
            || self.conclusion_fol.is_some()
            || self.steps_fol.is_some();
        if any_fol {
            if self.premises_fol.is_none() || self.conclusion_fol.is_none() {
                return Err("FOL fields need both `premises_fol` and `conclusion_fol`".into());
            }
            let pf = self.premises_fol.as_ref().expect("checked");
            if !self.premises.is_empty() && self.premises.len() != pf.len() {
                return Err(format!(
                    "{} premises but {} premises_fol",
                    self.premises.len(),
                    pf.len()
                ));
            }
            let sf = self.steps_fol.as_deref().unwrap_or_default();
            if !self.steps.is_empty() && self.steps.len() != sf.len() {
                return Err(format!(
                    "{} steps but {} steps_fol",
                    self.steps.len(),
                    sf.len()
                ));
            }
        } else {
            if self.premises.is_empty() {
                return Err("no premises".into());
            }
            if self.conclusion.trim().is_empty() {
                return Err("no conclusion".into());
            }
        }
        if let Some(g) = &self.gold_step_labels {
            let n = self.steps_fol.as_ref().map_or(self.steps.len(), Vec::len);
            if g.len() != n {
                return Err(format!("{} gold_step_labels for {n} steps", g.len()));
            }
        }
        Ok(())
    }

    pub fn fol(&self) -> Option<FolFields> {
        Some(FolFields {
            premises: self.premises_fol.clone()?,
            conclusion: self.conclusion_fol.clone()?,
            steps: self.steps_fol.clone().unwrap_or_default(),
        })
    }

    /// Build the verifier instance from the FOL fields.
    pub fn to_instance(&self) -> Result<Instance, InstanceError> {
        let fol = self.fol().ok_or(InstanceError::NoPremises)?;
        let (p, c, s) = fol
            .parse()
            .map_err(|(field, source)| InstanceError::Formula { field, source })?;
        let mut inst = Instance::new(&self.id, p, c, self.label.into(), s, self.answer.into())?;
        if !self.premises.is_empty() {
            inst.source_text = Some(SourceText {
                premises: self.premises.clone(),
                conclusion: self.conclusion.clone(),
                steps: self.steps.clone(),
            });
        }
        Ok(inst)
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let text = inst.source_text.clone().unwrap_or_default();
        let fol = FolFields::from_formulas(&inst.premises, &inst.conclusion, &inst.steps);
        InstanceRecord {
            id: inst.id.clone(),
            premises: text.premises,
            conclusion: text.conclusion,
            label: inst.label.into(),
            steps: text.steps,
            answer: inst.answer.into(),
            premises_fol: Some(fol.premises),
            conclusion_fol: Some(fol.conclusion),
            steps_fol: Some(fol.steps),
            gold_category: None,
            gold_step_labels: None,
        }
    }
}

/// One output line of `verify`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    #[serde(flatten)]
    pub report: VerificationReport,
    /// Indices of input steps that survived filtering and deduplication;
    /// present only when the instance went through translation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps_kept: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempts_used: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub execution: Option<ExecutionRecord>,
    /// Formulas produced by translation, before normalization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translated_fol: Option<FolFields>,
}

impl From<VerificationReport> for ReportRecord {
    fn from(report: VerificationReport) -> Self {
        ReportRecord {
            report,
            steps_kept: None,
            attempts_used: None,
            execution: None,
            translated_fol: None,
        }
    }
}
