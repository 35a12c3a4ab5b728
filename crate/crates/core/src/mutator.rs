//! Synthetic gold reasoning chains and seeded T2/T3/T4 perturbations.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fol::{Formula, Term};
use crate::verifier::{Category, Instance, SourceText, TriLabel, Verifier};

pub const MIN_DEPTH: usize = 2;
pub const MAX_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotMutableError {
    #[error("depth {0} is outside {MIN_DEPTH}..={MAX_DEPTH}")]
    Depth(usize),
    #[error("T3 needs at least two steps, found {0}")]
    TooFewSteps(usize),
    #[error("no premise lies off the proof path")]
    NoOffPathPremise,
    #[error("imported chain classifies as {0}, not T1")]
    NotGold(Category),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Synthetic,
    Imported,
}

/// A chain whose steps are all True and form a valid proof path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldChain {
    pub instance: Instance,
    pub provenance: Provenance,
    /// Premise indices not needed to derive the conclusion.
    pub off_path_premises: Vec<usize>,
}

impl GoldChain {
    /// Accept an existing instance as gold after checking it classifies as T1.
    pub fn imported(
        instance: Instance,
        off_path_premises: Vec<usize>,
        verifier: &Verifier,
    ) -> Result<Self, NotMutableError> {
        let category = verifier.verify_instance(&instance).category;
        if category != Category::T1 {
            return Err(NotMutableError::NotGold(category));
        }
        Ok(GoldChain {
            instance,
            provenance: Provenance::Imported,
            off_path_premises,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MutationKind {
    T2,
    T3,
    T4,
}

impl MutationKind {
    pub fn category(self) -> Category {
        match self {
            MutationKind::T2 => Category::T2,
            MutationKind::T3 => Category::T3,
            MutationKind::T4 => Category::T4,
        }
    }
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for MutationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "T2" => Ok(MutationKind::T2),
            "T3" => Ok(MutationKind::T3),
            "T4" => Ok(MutationKind::T4),
            _ => Err(format!("`{s}` is not a mutation kind (T2, T3, T4)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationSpec {
    pub kind: MutationKind,
    pub rng_seed: u64,
}

const ONSETS: [&str; 16] = [
    "b", "d", "f", "g", "j", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z",
];
const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
const CODAS: [&str; 8] = ["m", "r", "l", "n", "mp", "rp", "st", "sk"];
const ENDINGS: [&str; 3] = ["us", "ox", "ent"];
const NAMES: [&str; 16] = [
    "sally", "wren", "max", "alex", "fae", "rex", "polly", "stella", "sam", "leo", "nora", "ivan",
    "tess", "otto", "hugo", "mira",
];

fn pseudo_word(rng: &mut ChaCha8Rng) -> String {
    let mut w = String::new();
    for _ in 0..rng.gen_range(1..=2) {
        w.push_str(ONSETS.choose(rng).expect("non-empty"));
        w.push_str(VOWELS.choose(rng).expect("non-empty"));
        w.push_str(CODAS.choose(rng).expect("non-empty"));
    }
    w.push_str(ENDINGS.choose(rng).expect("non-empty"));
    w
}

fn fresh_words(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w = pseudo_word(rng);
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

fn article(word: &str) -> &'static str {
    if word.starts_with(['a', 'e', 'i', 'o', 'u']) {
        "an"
    } else {
        "a"
    }
}

fn fact_text(pred: &str, constant: &str) -> String {
    format!("{} is {} {}.", capitalize(constant), article(pred), pred)
}

fn rule(from: &str, to: &str) -> Formula {
    Formula::forall(
        "x",
        Formula::implies(
            Formula::atom(from, vec![Term::variable("x")]),
            Formula::atom(to, vec![Term::variable("x")]),
        ),
    )
}

/// A linear implication chain of the given depth: `p0(c)`, rules
/// `∀x (p_i(x) → p_{i+1}(x))`, conclusion `p_depth(c)`, steps instantiating
/// each hop. One or two unrelated facts about another constant are added,
/// and premise order is shuffled.
pub fn synthesize_gold(depth: usize, rng_seed: u64) -> Result<GoldChain, NotMutableError> {
    if !(MIN_DEPTH..=MAX_DEPTH).contains(&depth) {
        return Err(NotMutableError::Depth(depth));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let spare = rng.gen_range(1..=2);
    let words = fresh_words(&mut rng, depth + 1 + spare);
    let (chain, extra) = words.split_at(depth + 1);
    let mut names: Vec<&str> = NAMES.to_vec();
    names.shuffle(&mut rng);
    let (c, d) = (names[0], names[1]);

    // (formula, text, on_path)
    let mut premises: Vec<(Formula, String, bool)> = Vec::new();
    premises.push((
        Formula::fact(&chain[0], &[c]),
        fact_text(&chain[0], c),
        true,
    ));
    for w in chain.windows(2) {
        premises.push((
            rule(&w[0], &w[1]),
            format!("Every {} is {} {}.", w[0], article(&w[1]), w[1]),
            true,
        ));
    }
    for q in extra {
        premises.push((Formula::fact(q, &[d]), fact_text(q, d), false));
    }
    premises.shuffle(&mut rng);

    let steps: Vec<Formula> = chain[1..].iter().map(|p| Formula::fact(p, &[c])).collect();
    let step_text: Vec<String> = chain[1..].iter().map(|p| fact_text(p, c)).collect();
    let conclusion = Formula::fact(&chain[depth], &[c]);
    let off_path_premises = premises
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.2)
        .map(|(i, _)| i)
        .collect();
    let mut instance = Instance::new(
        format!("gold-d{depth}-s{rng_seed}"),
        premises.iter().map(|p| p.0.clone()).collect(),
        conclusion,
        true,
        steps,
        true,
    )
    .expect("synthetic names are distinct lowercase words");
    instance.source_text = Some(SourceText {
        premises: premises.into_iter().map(|p| p.1).collect(),
        conclusion: fact_text(&chain[depth], c),
        steps: step_text,
    });
    Ok(GoldChain {
        instance,
        provenance: Provenance::Synthetic,
        off_path_premises,
    })
}

struct Draft {
    steps: Vec<Formula>,
    text: Option<Vec<String>>,
    labels: Vec<TriLabel>,
}

impl Draft {
    fn insert(&mut self, pos: usize, f: Formula, text: String, label: TriLabel) {
        self.steps.insert(pos, f);
        if let Some(t) = &mut self.text {
            t.insert(pos, text);
        }
        self.labels.insert(pos, label);
    }
}

fn negate_premise(chain: &GoldChain, draft: &mut Draft, rng: &mut ChaCha8Rng) {
    let inst = &chain.instance;
    let j = rng.gen_range(0..inst.premises.len());
    let pos = rng.gen_range(0..draft.steps.len().max(1));
    let text = inst
        .source_text
        .as_ref()
        .map(|s| format!("It is not true that {}", lowercase_first(&s.premises[j])))
        .unwrap_or_default();
    draft.insert(
        pos,
        Formula::not(inst.premises[j].clone()),
        text,
        TriLabel::False,
    );
}

fn lowercase_first(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_lowercase().chain(c).collect())
        .unwrap_or_default()
}

fn break_path(
    chain: &GoldChain,
    draft: &mut Draft,
    rng: &mut ChaCha8Rng,
) -> Result<(), NotMutableError> {
    let m = draft.steps.len();
    if m < 2 {
        return Err(NotMutableError::TooFewSteps(m));
    }
    let &j = chain
        .off_path_premises
        .choose(rng)
        .ok_or(NotMutableError::NoOffPathPremise)?;
    let keep = rng.gen_range(1..m);
    draft.steps.truncate(keep);
    draft.labels.truncate(keep);
    if let Some(t) = &mut draft.text {
        t.truncate(keep);
    }
    let text = chain
        .instance
        .source_text
        .as_ref()
        .map(|s| s.premises[j].clone())
        .unwrap_or_default();
    draft.insert(
        keep,
        chain.instance.premises[j].clone(),
        text,
        TriLabel::True,
    );
    Ok(())
}

/// Apply a mutation and return the instance with the step labels and
/// category it is constructed to have.
pub fn mutate_with_labels(
    chain: &GoldChain,
    spec: MutationSpec,
) -> Result<(Instance, Vec<TriLabel>, Category), NotMutableError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let inst = &chain.instance;
    let mut draft = Draft {
        steps: inst.steps.clone(),
        text: inst.source_text.as_ref().map(|s| s.steps.clone()),
        labels: vec![TriLabel::True; inst.steps.len()],
    };
    match spec.kind {
        MutationKind::T2 => negate_premise(chain, &mut draft, &mut rng),
        MutationKind::T3 => break_path(chain, &mut draft, &mut rng)?,
        MutationKind::T4 => {
            break_path(chain, &mut draft, &mut rng)?;
            negate_premise(chain, &mut draft, &mut rng);
        }
    }
    let mut out = inst.clone();
    out.id = format!("{}-{}-s{}", inst.id, spec.kind, spec.rng_seed);
    out.steps = draft.steps;
    if let (Some(src), Some(text)) = (&mut out.source_text, draft.text) {
        src.steps = text;
    }
    Ok((out, draft.labels, spec.kind.category()))
}

pub fn mutate(chain: &GoldChain, spec: MutationSpec) -> Result<Instance, NotMutableError> {
    mutate_with_labels(chain, spec).map(|r| r.0)
}
