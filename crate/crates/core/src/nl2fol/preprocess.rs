use regex::Regex;
use std::sync::OnceLock;
use thiserror::Error;

pub const DEFAULT_SPECULATION_KEYWORDS: [&str; 11] = [
    "possible",
    "possibly",
    "perhaps",
    "might",
    "may",
    "contradict",
    "contradiction",
    "not necessarily",
    "uncertain",
    "unclear",
    "cannot determine",
];

fn list_marker() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?m)(?:^|\s)\(?\d+\)\s+|^\s*\d+\.\s+").expect("valid regex"))
}

/// Split reasoning text into sentences on `.`, `!`, `?` and numbered-list
/// markers such as `1)`. Terminators stay with their sentence.
pub fn split_steps(reasoning_text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in list_marker().split(reasoning_text) {
        let mut start = 0;
        let chars: Vec<(usize, char)> = chunk.char_indices().collect();
        for (k, &(i, c)) in chars.iter().enumerate() {
            if !matches!(c, '.' | '!' | '?') {
                continue;
            }
            let boundary = match chars.get(k + 1) {
                None => true,
                Some(&(_, next)) => next.is_whitespace(),
            };
            if boundary {
                let end = i + c.len_utf8();
                push_trimmed(&mut out, &chunk[start..end]);
                start = end;
            }
        }
        push_trimmed(&mut out, &chunk[start..]);
    }
    out
}

fn push_trimmed(out: &mut Vec<String>, s: &str) {
    let t = s.trim();
    if !t.is_empty() && !t.chars().all(|c| matches!(c, '.' | '!' | '?')) {
        out.push(t.to_string());
    }
}

/// Sentences paired with their original positions.
pub type Indexed = Vec<(usize, String)>;

/// Drops sentences containing an ambiguity-indicative keyword
/// (case-insensitive, whole words).
#[derive(Debug, Clone)]
pub struct SpeculationFilter {
    keywords: Vec<String>,
    pattern: Option<Regex>,
}

impl Default for SpeculationFilter {
    fn default() -> Self {
        SpeculationFilter::new(DEFAULT_SPECULATION_KEYWORDS)
    }
}

impl SpeculationFilter {
    pub fn new<I, S>(keywords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let keywords: Vec<String> = keywords
            .into_iter()
            .map(|k| k.as_ref().trim().to_string())
            .filter(|k| !k.is_empty())
            .collect();
        let alternatives: Vec<String> = keywords
            .iter()
            .map(|k| {
                k.split_whitespace()
                    .map(regex::escape)
                    .collect::<Vec<_>>()
                    .join(r"\s+")
            })
            .collect();
        let pattern = (!alternatives.is_empty()).then(|| {
            Regex::new(&format!(r"(?i)\b(?:{})\b", alternatives.join("|")))
                .expect("escaped keywords")
        });
        SpeculationFilter { keywords, pattern }
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn is_speculative(&self, sentence: &str) -> bool {
        self.pattern.as_ref().is_some_and(|p| p.is_match(sentence))
    }

    /// Returns `(kept, dropped)`, each with original indices, in input order.
    pub fn filter<S: AsRef<str>>(&self, sentences: &[S]) -> (Indexed, Indexed) {
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        for (i, s) in sentences.iter().enumerate() {
            let s = s.as_ref();
            if self.is_speculative(s) {
                dropped.push((i, s.to_string()));
            } else {
                kept.push((i, s.to_string()));
            }
        }
        (kept, dropped)
    }
}

pub fn filter_speculative<S: AsRef<str>>(sentences: &[S]) -> (Indexed, Indexed) {
    SpeculationFilter::default().filter(sentences)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnswerError {
    #[error("response is empty")]
    Empty,
    #[error("final line `{0}` carries no True/False verdict")]
    NoVerdict(String),
    #[error("final line `{0}` carries both True and False")]
    Ambiguous(String),
    #[error("response has no reasoning before the verdict")]
    NoReasoning,
}

/// A model response in answer-after-reasoning form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawResponse {
    pub reasoning_text: String,
    pub predicted_answer: bool,
}

fn verdict_word() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\b(true|false)\b").expect("valid regex"))
}

impl RawResponse {
    /// The last non-empty line must name exactly one of True/False; the lines
    /// before it are the reasoning.
    pub fn parse(text: &str) -> Result<Self, AnswerError> {
        let lines: Vec<&str> = text.lines().collect();
        let last = lines
            .iter()
            .rposition(|l| !l.trim().is_empty())
            .ok_or(AnswerError::Empty)?;
        let verdict_line = lines[last].trim();
        let mut seen: Vec<bool> = verdict_word()
            .find_iter(verdict_line)
            .map(|m| m.as_str().eq_ignore_ascii_case("true"))
            .collect();
        seen.sort_unstable();
        seen.dedup();
        let predicted_answer = match seen.as_slice() {
            [] => return Err(AnswerError::NoVerdict(verdict_line.to_string())),
            [b] => *b,
            _ => return Err(AnswerError::Ambiguous(verdict_line.to_string())),
        };
        let reasoning_text = lines[..last].join("\n").trim().to_string();
        if reasoning_text.is_empty() {
            return Err(AnswerError::NoReasoning);
        }
        Ok(RawResponse {
            reasoning_text,
            predicted_answer,
        })
    }

    /// Sentences of the reasoning with speculative ones removed.
    pub fn steps(&self, filter: &SpeculationFilter) -> Vec<String> {
        let sentences = split_steps(&self.reasoning_text);
        filter
            .filter(&sentences)
            .0
            .into_iter()
            .map(|(_, s)| s)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitting() {
        assert_eq!(
            split_steps("1) Sally is a dumpus. 2) Sally is a gorpus."),
            vec!["Sally is a dumpus.", "Sally is a gorpus."]
        );
        assert!(split_steps("").is_empty());
        assert_eq!(split_steps("A. B. C.").len(), 3);
        assert_eq!(
            split_steps("1. First step\n2. Second step! Done?"),
            vec!["First step", "Second step!", "Done?"]
        );
        assert_eq!(
            split_steps("Pi is 3.14 roughly."),
            vec!["Pi is 3.14 roughly."]
        );
    }

    #[test]
    fn speculation() {
        let (kept, dropped) = filter_speculative(&[
            "Wren is not necessarily a gorpus.",
            "The tiger eats the dog.",
            "It is possible that A.",
            "Impossible things happen.",
        ]);
        assert_eq!(
            kept,
            vec![
                (1, "The tiger eats the dog.".to_string()),
                (3, "Impossible things happen.".to_string())
            ]
        );
        assert_eq!(dropped.len(), 2);
        assert!(SpeculationFilter::new(["NOT   necessarily"]).is_speculative("not\tnecessarily so"));
        assert!(!SpeculationFilter::new(Vec::<String>::new()).is_speculative("possible"));
    }

    #[test]
    fn answers() {
        let r =
            RawResponse::parse("Leo is a pet.\nSo Leo is an animal.\n\nAnswer: True\n").unwrap();
        assert!(r.predicted_answer);
        assert_eq!(r.reasoning_text, "Leo is a pet.\nSo Leo is an animal.");
        assert!(!RawResponse::parse("x\nFALSE").unwrap().predicted_answer);
        assert!(
            RawResponse::parse("x\ntrue, true")
                .unwrap()
                .predicted_answer
        );
        assert!(matches!(
            RawResponse::parse("x\nTrue or False"),
            Err(AnswerError::Ambiguous(_))
        ));
        assert!(matches!(
            RawResponse::parse("x\nmaybe"),
            Err(AnswerError::NoVerdict(_))
        ));
        assert_eq!(RawResponse::parse("True"), Err(AnswerError::NoReasoning));
        assert_eq!(RawResponse::parse(" \n"), Err(AnswerError::Empty));
    }
}
