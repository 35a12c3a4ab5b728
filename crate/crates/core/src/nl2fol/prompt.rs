use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::fol::{parse_formula, print_formula, FolError, Formula};
use crate::tptp::repair_logged;

const BUNDLED_TEMPLATE: &str = include_str!("../../templates/nl2fol_prompt.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("prompt template `{}` cannot be read: {reason}", path.display())]
    Missing { path: PathBuf, reason: String },
    #[error("prompt template lacks the `{0}` placeholder")]
    Placeholder(&'static str),
    #[error("a prompt needs at least one premise")]
    NoPremises,
}

/// Prompt text with `{premises}` and `{conclusions}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    text: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        PromptTemplate::bundled()
    }
}

impl PromptTemplate {
    pub fn bundled() -> Self {
        PromptTemplate {
            text: BUNDLED_TEMPLATE.to_string(),
        }
    }

    pub fn from_text(text: impl Into<String>) -> Result<Self, TemplateError> {
        let text = text.into();
        for p in ["{premises}", "{conclusions}"] {
            if !text.contains(p) {
                return Err(TemplateError::Placeholder(p));
            }
        }
        Ok(PromptTemplate { text })
    }

    pub fn from_file(path: &Path) -> Result<Self, TemplateError> {
        let text = std::fs::read_to_string(path).map_err(|e| TemplateError::Missing {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        PromptTemplate::from_text(text)
    }

    /// Fill the template. Steps and the candidate conclusion together form the
    /// numbered Conclusions list, the candidate conclusion last.
    pub fn render<S: AsRef<str>>(
        &self,
        premises: &[S],
        steps: &[S],
        conclusion: &str,
    ) -> Result<String, TemplateError> {
        if premises.is_empty() {
            return Err(TemplateError::NoPremises);
        }
        let conclusions: Vec<&str> = steps
            .iter()
            .map(AsRef::as_ref)
            .chain(std::iter::once(conclusion))
            .collect();
        let premises: Vec<&str> = premises.iter().map(AsRef::as_ref).collect();
        Ok(self
            .text
            .replace("{premises}", &numbered(&premises))
            .replace("{conclusions}", &numbered(&conclusions)))
    }
}

fn numbered(items: &[&str]) -> String {
    items
        .iter()
        .enumerate()
        .map(|(i, s)| format!("({}) {}", i + 1, s.trim()))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn build_prompt<S: AsRef<str>>(
    premises: &[S],
    steps: &[S],
    conclusion: &str,
) -> Result<String, TemplateError> {
    PromptTemplate::bundled().render(premises, steps, conclusion)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Section {
    Premises,
    Conclusions,
}

impl std::fmt::Display for Section {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Section::Premises => "Premises",
            Section::Conclusions => "Conclusions",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OutputError {
    #[error("{section}: missing indices {missing:?}")]
    MissingIndex {
        section: Section,
        missing: Vec<usize>,
    },
    #[error("{section}: index ({index}) appears more than once")]
    DuplicateIndex { section: Section, index: usize },
    #[error("{section}: unexpected index ({index})")]
    UnexpectedIndex { section: Section, index: usize },
    #[error("line `{line}` has no `(index)` reference")]
    NoIndex { line: String },
    #[error("cannot parse `{line}`: {error}")]
    UnparseableFormula { line: String, error: FolError },
}

/// Formulas recovered from one model output, by 0-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedOutput {
    pub premises: Vec<Formula>,
    pub conclusions: Vec<Formula>,
    /// Repairs applied, as `(line, description)`.
    pub repairs: Vec<(String, String)>,
}

fn strip_header(line: &str) -> Option<(Section, &str)> {
    for (name, section) in [
        ("premises", Section::Premises),
        ("conclusions", Section::Conclusions),
    ] {
        let trimmed = line.trim_start().trim_start_matches(['#', '*', ' ']);
        let head = trimmed.get(..name.len());
        if head.is_some_and(|h| h.eq_ignore_ascii_case(name)) {
            let rest = trimmed[name.len()..].trim_start();
            if let Some(rest) = rest.strip_prefix(':') {
                return Some((section, rest.trim_start_matches('*')));
            }
        }
    }
    None
}

fn parse_index(reference: &str) -> Option<usize> {
    let r = reference.trim_start().strip_prefix('(')?;
    let close = r.find(')')?;
    r[..close].trim().parse().ok()
}

/// Parse `fol-formula ::: (index) reference` lines grouped under
/// `Premises:` and `Conclusions:` headers, checking that indices `1..=n`
/// appear exactly once in each section.
pub fn parse_llm_output(
    text: &str,
    n_premises: usize,
    n_conclusions: usize,
) -> Result<ParsedOutput, OutputError> {
    let mut section = Section::Premises;
    let mut found: BTreeMap<Section, BTreeMap<usize, Formula>> = BTreeMap::new();
    let mut repairs = Vec::new();
    for raw in text.lines() {
        let mut line = raw;
        if let Some((s, rest)) = strip_header(line) {
            section = s;
            line = rest;
        }
        let Some((fol, reference)) = line.split_once(":::") else {
            continue;
        };
        let index = parse_index(reference).ok_or_else(|| OutputError::NoIndex {
            line: raw.trim().to_string(),
        })?;
        let limit = match section {
            Section::Premises => n_premises,
            Section::Conclusions => n_conclusions,
        };
        if index == 0 || index > limit {
            return Err(OutputError::UnexpectedIndex { section, index });
        }
        let (fixed, actions) = repair_logged(fol.trim());
        for a in &actions {
            repairs.push((fol.trim().to_string(), a.describe()));
        }
        let formula = parse_formula(&fixed).map_err(|error| OutputError::UnparseableFormula {
            line: raw.trim().to_string(),
            error,
        })?;
        if found
            .entry(section)
            .or_default()
            .insert(index, formula)
            .is_some()
        {
            return Err(OutputError::DuplicateIndex { section, index });
        }
    }
    let mut take = |section: Section, n: usize| -> Result<Vec<Formula>, OutputError> {
        let mut got = found.remove(&section).unwrap_or_default();
        let missing: Vec<usize> = (1..=n).filter(|i| !got.contains_key(i)).collect();
        if !missing.is_empty() {
            return Err(OutputError::MissingIndex { section, missing });
        }
        Ok((1..=n).map(|i| got.remove(&i).expect("checked")).collect())
    };
    Ok(ParsedOutput {
        premises: take(Section::Premises, n_premises)?,
        conclusions: take(Section::Conclusions, n_conclusions)?,
        repairs,
    })
}

/// Render formulas with their reference sentences in the output format that
/// [`parse_llm_output`] reads.
pub fn render_output<S: AsRef<str>>(
    premises: &[(Formula, S)],
    conclusions: &[(Formula, S)],
) -> String {
    let mut out = String::new();
    for (header, items) in [("Premises:", premises), ("Conclusions:", conclusions)] {
        out.push_str(header);
        out.push('\n');
        for (i, (f, reference)) in items.iter().enumerate() {
            out.push_str(&format!(
                "{} ::: ({}) {}\n",
                print_formula(f),
                i + 1,
                reference.as_ref()
            ));
        }
    }
    out
}
