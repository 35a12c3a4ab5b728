//! Translation and classification metrics: execution rate and accuracy,
//! FOL-BLEU, logical equivalence, macro F1 over step labels and the
//! category confusion matrix.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{check_entailment, EngineConfig, OutcomeKind};
use crate::fol::{print_formula, Formula};
use crate::verifier::{Category, TriLabel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("batch is empty")]
    EmptyBatch,
    #[error("no instance was executed")]
    NoExecutedInstances,
    #[error("{predicted} predictions but {gold} gold labels")]
    LengthMismatch { predicted: usize, gold: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot tokenize `{found}` at offset {offset}")]
pub struct TokenizeError {
    pub offset: usize,
    pub found: char,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivalenceError {
    #[error("equivalence undecided: {0}")]
    Undecided(String),
    #[error("engine error: {0}")]
    Engine(String),
}

/// First-attempt translation outcome of one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionRecord {
    pub executed: bool,
    /// Whether the conclusion verified as the label; `None` when not executed.
    pub conclusion_matches: Option<bool>,
}

pub fn execution_rate(results: &[ExecutionRecord]) -> Result<f64, MetricError> {
    if results.is_empty() {
        return Err(MetricError::EmptyBatch);
    }
    let ok = results.iter().filter(|r| r.executed).count();
    Ok(ok as f64 / results.len() as f64)
}

pub fn execution_accuracy(results: &[ExecutionRecord]) -> Result<f64, MetricError> {
    let executed: Vec<_> = results.iter().filter(|r| r.executed).collect();
    if executed.is_empty() {
        return Err(MetricError::NoExecutedInstances);
    }
    let hits = executed
        .iter()
        .filter(|r| r.conclusion_matches == Some(true))
        .count();
    Ok(hits as f64 / executed.len() as f64)
}

/// Split FOL text into quantifier, connective, punctuation and identifier
/// tokens. Connective spellings are mapped to their Unicode symbols;
/// identifiers keep their casing.
pub fn tokenize(text: &str) -> Result<Vec<String>, TokenizeError> {
    const SYMBOLS: [(&str, &str); 24] = [
        ("<->", "↔"),
        ("<~>", "⊕"),
        ("->", "→"),
        ("=>", "→"),
        ("∀", "∀"),
        ("∃", "∃"),
        ("¬", "¬"),
        ("~", "¬"),
        ("∧", "∧"),
        ("&", "∧"),
        ("∨", "∨"),
        ("|", "∨"),
        ("→", "→"),
        ("⇒", "→"),
        ("↔", "↔"),
        ("⇔", "↔"),
        ("⊕", "⊕"),
        ("(", "("),
        (")", ")"),
        ("[", "("),
        ("]", ")"),
        (",", ","),
        (".", "."),
        (":", ":"),
    ];
    let mut out = Vec::new();
    let mut rest = text;
    let mut offset = 0;
    while let Some(c) = rest.chars().next() {
        if c.is_whitespace() {
            rest = &rest[c.len_utf8()..];
            offset += 1;
            continue;
        }
        if let Some((sym, canon)) = SYMBOLS.iter().find(|(s, _)| rest.starts_with(s)) {
            out.push(canon.to_string());
            offset += sym.chars().count();
            rest = &rest[sym.len()..];
            continue;
        }
        if c.is_alphanumeric() || c == '_' {
            let end = rest
                .char_indices()
                .find(|&(_, ch)| !(ch.is_alphanumeric() || ch == '_'))
                .map_or(rest.len(), |(i, _)| i);
            let word = &rest[..end];
            out.push(match word {
                "forall" => "∀".to_string(),
                "exists" => "∃".to_string(),
                "xor" => "⊕".to_string(),
                w => w.to_string(),
            });
            offset += word.chars().count();
            rest = &rest[end..];
            continue;
        }
        return Err(TokenizeError { offset, found: c });
    }
    Ok(out)
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut m = HashMap::new();
    for w in tokens.windows(n) {
        *m.entry(w).or_default() += 1;
    }
    m
}

/// Sentence BLEU over token sequences: 1- to 4-grams, uniform weights,
/// add-one smoothing for n > 1, standard brevity penalty.
pub fn bleu(candidate: &[String], reference: &[String]) -> f64 {
    if candidate.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=4 {
        let cand = ngram_counts(candidate, n);
        let refs = ngram_counts(reference, n);
        let total: usize = cand.values().sum();
        let matched: usize = cand
            .iter()
            .map(|(g, &c)| c.min(refs.get(g).copied().unwrap_or(0)))
            .sum();
        let p = if n == 1 {
            if matched == 0 {
                return 0.0;
            }
            matched as f64 / total as f64
        } else {
            (matched + 1) as f64 / (total + 1) as f64
        };
        log_sum += p.ln() / 4.0;
    }
    let (c, r) = (candidate.len() as f64, reference.len() as f64);
    let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    (bp * log_sum.exp()).clamp(0.0, 1.0)
}

pub fn fol_bleu(candidate: &str, reference: &str) -> Result<f64, TokenizeError> {
    Ok(bleu(&tokenize(candidate)?, &tokenize(reference)?))
}

pub fn fol_bleu_formulas(candidate: &Formula, reference: &Formula) -> f64 {
    fol_bleu(&print_formula(candidate), &print_formula(reference))
        .expect("printed formulas always tokenize")
}

/// Mutual entailment of `f` and `g`.
pub fn logical_equivalence(
    f: &Formula,
    g: &Formula,
    cfg: &EngineConfig,
) -> Result<bool, EquivalenceError> {
    for (a, b) in [(f, g), (g, f)] {
        let out = check_entailment(std::slice::from_ref(a), b, cfg);
        match out.kind {
            OutcomeKind::Entailed => {}
            OutcomeKind::NotEntailed => return Ok(false),
            OutcomeKind::Indeterminate => return Err(EquivalenceError::Undecided(out.detail)),
            OutcomeKind::EngineError => return Err(EquivalenceError::Engine(out.detail)),
        }
    }
    Ok(true)
}

/// Unweighted mean of per-class F1 over the classes present in either list.
pub fn macro_f1(predicted: &[TriLabel], gold: &[TriLabel]) -> Result<f64, MetricError> {
    if predicted.len() != gold.len() {
        return Err(MetricError::LengthMismatch {
            predicted: predicted.len(),
            gold: gold.len(),
        });
    }
    if gold.is_empty() {
        return Err(MetricError::EmptyBatch);
    }
    let mut scores = Vec::new();
    for class in TriLabel::ALL {
        let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
        for (p, g) in predicted.iter().zip(gold) {
            match (*p == class, *g == class) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        if tp + fp + fn_ > 0 {
            scores.push(2.0 * tp as f64 / (2 * tp + fp + fn_) as f64);
        }
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Counts indexed `[gold][predicted]` in [`Category::ALL`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Confusion {
    pub labels: Vec<Category>,
    pub matrix: Vec<Vec<u64>>,
    pub accuracy: f64,
}

impl Confusion {
    pub fn row_total(&self, gold: Category) -> u64 {
        self.matrix[gold.index()].iter().sum()
    }

    pub fn row_accuracy(&self, gold: Category) -> Option<f64> {
        let total = self.row_total(gold);
        (total > 0).then(|| self.matrix[gold.index()][gold.index()] as f64 / total as f64)
    }
}

pub fn category_confusion(
    predicted: &[Category],
    gold: &[Category],
) -> Result<Confusion, MetricError> {
    if predicted.len() != gold.len() {
        return Err(MetricError::LengthMismatch {
            predicted: predicted.len(),
            gold: gold.len(),
        });
    }
    if gold.is_empty() {
        return Err(MetricError::EmptyBatch);
    }
    let mut matrix = vec![vec![0u64; Category::ALL.len()]; Category::ALL.len()];
    for (p, g) in predicted.iter().zip(gold) {
        matrix[g.index()][p.index()] += 1;
    }
    let trace: u64 = (0..Category::ALL.len()).map(|i| matrix[i][i]).sum();
    Ok(Confusion {
        labels: Category::ALL.to_vec(),
        matrix,
        accuracy: trace as f64 / gold.len() as f64,
    })
}

/// Aggregate metrics. Entries are `None` when the batch carries no data
/// for them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub instances: usize,
    pub execution_rate: Option<f64>,
    pub execution_accuracy: Option<f64>,
    pub fol_bleu: Option<f64>,
    pub logical_equivalence_rate: Option<f64>,
    pub macro_f1: Option<f64>,
    pub confusion: Option<Confusion>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_formula;
    use TriLabel::{False as F, True as T, Unknown as U};

    fn rec(executed: bool, matches: Option<bool>) -> ExecutionRecord {
        ExecutionRecord {
            executed,
            conclusion_matches: matches,
        }
    }

    #[test]
    fn execution_metrics() {
        let batch = [
            rec(true, Some(true)),
            rec(false, None),
            rec(true, Some(true)),
            rec(false, None),
        ];
        assert_eq!(execution_rate(&batch), Ok(0.5));
        assert_eq!(execution_rate(&[]), Err(MetricError::EmptyBatch));
        let ea = [
            rec(true, Some(true)),
            rec(true, Some(true)),
            rec(true, Some(false)),
        ];
        assert!((execution_accuracy(&ea).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            execution_accuracy(&[rec(false, None)]),
            Err(MetricError::NoExecutedInstances)
        );
    }

    #[test]
    fn tokenizer() {
        assert_eq!(
            tokenize("∀x (Pet(x) -> animal(x))").unwrap(),
            ["∀", "x", "(", "Pet", "(", "x", ")", "→", "animal", "(", "x", ")", ")"]
        );
        assert_eq!(tokenize("forall x p(x)").unwrap()[0], "∀");
        assert!(tokenize("Revenue(a) > 3").is_err());
    }

    #[test]
    fn bleu_values() {
        assert_eq!(
            fol_bleu("∀x (p(x) → q(x))", "∀x (p(x) → q(x))").unwrap(),
            1.0
        );
        let like = fol_bleu("Like(a,b)", "Likes(a,b)").unwrap();
        assert!(like < 1.0 && like > 0.0);
        // p1 = 2/4, p2 = 1/4, p3 = 1/3, p4 = 1/2 after smoothing, BP = 1
        let disjoint = fol_bleu("p(a)", "q(b)").unwrap();
        assert!((disjoint - 0.379_917).abs() < 1e-6, "{disjoint}");
        assert_eq!(fol_bleu("p", "q").unwrap(), 0.0);
    }

    #[test]
    fn equivalence() {
        let cfg = EngineConfig::default();
        let f = |s: &str| parse_formula(s).unwrap();
        assert_eq!(logical_equivalence(&f("p(a)"), &f("p(a)"), &cfg), Ok(true));
        assert_eq!(
            logical_equivalence(&f("p(a) ∧ q(a)"), &f("q(a) ∧ p(a)"), &cfg),
            Ok(true)
        );
        assert_eq!(
            logical_equivalence(
                &f("∀x (dog(x) → pet(x))"),
                &f("∀x ((pet(x) ∧ dog(x)) → pet(x))"),
                &cfg
            ),
            Ok(false)
        );
    }

    #[test]
    fn f1() {
        assert_eq!(macro_f1(&[T, F, U], &[T, F, U]), Ok(1.0));
        assert_eq!(macro_f1(&[F, F], &[T, T]), Ok(0.0));
        assert_eq!(macro_f1(&[T, T, U, T], &[T, T, U, T]), Ok(1.0));
        assert!(matches!(
            macro_f1(&[T], &[T, T]),
            Err(MetricError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn confusion() {
        use Category::*;
        let gold: Vec<Category> = [T1, T2, T3, T4].iter().flat_map(|c| vec![*c; 50]).collect();
        let mut pred = gold.clone();
        let c = category_confusion(&pred, &gold).unwrap();
        assert_eq!(c.accuracy, 1.0);
        pred[150] = T3;
        pred[151] = T2;
        let c = category_confusion(&pred, &gold).unwrap();
        assert_eq!(c.row_accuracy(T4), Some(0.96));
        assert_eq!(c.accuracy, 0.99);
        assert_eq!(c.row_total(T4), 50);
        assert_eq!(category_confusion(&[], &[]), Err(MetricError::EmptyBatch));
    }
}
