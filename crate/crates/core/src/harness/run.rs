use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::wire::{FolFields, InstanceRecord, ReportRecord};
use super::{HarnessError, RunConfig};
use crate::batch;
use crate::fol::{normalize, parse_formula, print_formula, Formula};
use crate::metrics::{
    category_confusion, execution_accuracy, execution_rate, fol_bleu, logical_equivalence,
    macro_f1, ExecutionRecord, MetricReport,
};
use crate::mutator::{mutate_with_labels, synthesize_gold, MutationKind, MutationSpec};
use crate::nl2fol::{
    dedup_steps, translate, ChatClient, HttpChatClient, NlInstance, PromptTemplate,
    ScriptedChatClient, SpeculationFilter,
};
use crate::tptp::{emit_problem, TptpProblem};
use crate::verifier::{Category, Diagnostic, VerificationReport, Verifier};

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let file =
        fs::File::open(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line)
            .map_err(|e| HarnessError::Schema(format!("{} line {}: {e}", path.display(), i + 1)))?;
        out.push(item);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), HarnessError> {
    let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut w = BufWriter::new(fs::File::create(path).map_err(io)?);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| HarnessError::Io(e.to_string()))?;
        w.write_all(b"\n").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Category counts of a verify run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub categories: BTreeMap<Category, usize>,
}

impl Summary {
    pub fn of(reports: &[ReportRecord]) -> Self {
        let mut categories: BTreeMap<Category, usize> =
            Category::ALL.iter().map(|c| (*c, 0)).collect();
        for r in reports {
            *categories.entry(r.report.category).or_default() += 1;
        }
        Summary {
            total: reports.len(),
            categories,
        }
    }
}

struct Pipeline<'a> {
    verifier: Verifier,
    cfg: &'a RunConfig,
    client: Option<Box<dyn ChatClient>>,
    template: PromptTemplate,
    filter: SpeculationFilter,
}

impl Pipeline<'_> {
    fn process(&self, r: &InstanceRecord) -> ReportRecord {
        if r.fol().is_some() {
            return match r.to_instance() {
                Ok(inst) => self.verifier.verify_instance(&inst).into(),
                Err(e) => VerificationReport::error(
                    &r.id,
                    vec![Diagnostic::new("invalid_fol", e.to_string())],
                )
                .into(),
            };
        }
        let client = self.client.as_deref().expect("checked before the batch");
        let (kept, dropped) = self.filter.filter(&r.steps);
        let mut diagnostics: Vec<Diagnostic> = dropped
            .iter()
            .map(|(i, s)| Diagnostic::new("filtered", format!("step {i} is speculative: {s}")))
            .collect();
        let nl = NlInstance {
            id: r.id.clone(),
            premises: r.premises.clone(),
            conclusion: r.conclusion.clone(),
            label: r.label.into(),
            steps: kept.iter().map(|(_, s)| s.clone()).collect(),
            answer: r.answer.into(),
        };
        let t = match translate(&nl, client, &self.template, &self.verifier) {
            Ok(t) => t,
            Err(e) => {
                diagnostics.push(Diagnostic::new("translation_failed", e.to_string()));
                return ReportRecord {
                    attempts_used: Some(e.attempts),
                    execution: Some(e.first_attempt),
                    ..VerificationReport::error(&r.id, diagnostics).into()
                };
            }
        };
        diagnostics.extend(t.diagnostics.iter().cloned());
        let translated_fol =
            FolFields::from_formulas(&t.premise_fols, &t.conclusion_fol, &t.step_fols);
        let extras = |mut rec: ReportRecord, kept_idx: Option<Vec<usize>>| {
            rec.steps_kept = kept_idx;
            rec.attempts_used = Some(t.attempts_used);
            rec.execution = Some(t.first_attempt);
            rec.translated_fol = Some(translated_fol.clone());
            rec
        };
        let unique = match dedup_steps(&t.instance.steps, &self.cfg.engine) {
            Ok(u) => u,
            Err(e) => {
                diagnostics.push(Diagnostic::new("engine_error", e.to_string()));
                return extras(VerificationReport::error(&r.id, diagnostics).into(), None);
            }
        };
        let mut inst = t.instance.clone();
        inst.steps = unique
            .iter()
            .map(|&i| t.instance.steps[i].clone())
            .collect();
        let mut report = self.verifier.verify_instance(&inst);
        diagnostics.append(&mut report.diagnostics);
        report.diagnostics = diagnostics;
        let steps_kept = unique.iter().map(|&i| kept[i].0).collect();
        extras(report.into(), Some(steps_kept))
    }
}

/// Verify records in input order using `cfg.workers` threads.
pub fn verify_records(
    cfg: &RunConfig,
    records: &[InstanceRecord],
) -> Result<Vec<ReportRecord>, HarnessError> {
    for (i, r) in records.iter().enumerate() {
        r.validate()
            .map_err(|e| HarnessError::Schema(format!("record {} (`{}`): {e}", i + 1, r.id)))?;
    }
    let needs_llm = records.iter().any(|r| r.fol().is_none());
    let client: Option<Box<dyn ChatClient>> = if !needs_llm {
        None
    } else if let Some(path) = &cfg.llm_script {
        Some(Box::new(
            ScriptedChatClient::from_file(path).map_err(|e| HarnessError::Config(e.to_string()))?,
        ))
    } else if let Some(llm) = &cfg.llm {
        Some(Box::new(HttpChatClient::new(llm.clone())))
    } else {
        return Err(HarnessError::Config(
            "instances without FOL fields need an LLM endpoint or script".into(),
        ));
    };
    let template = match &cfg.prompt_template {
        Some(p) => PromptTemplate::from_file(p).map_err(|e| HarnessError::Config(e.to_string()))?,
        None => PromptTemplate::bundled(),
    };
    let filter = match &cfg.speculation_keywords {
        Some(k) => SpeculationFilter::new(k),
        None => SpeculationFilter::default(),
    };
    let pipeline = Pipeline {
        verifier: Verifier::new(cfg.engine.clone(), cfg.policy),
        cfg,
        client,
        template,
        filter,
    };
    Ok(batch::map_ordered(records, cfg.workers, |r| {
        pipeline.process(r)
    }))
}

/// Write `reports.jsonl` and `summary.json` into `out_dir`.
pub fn run_verify(cfg: &RunConfig, input: &Path, out_dir: &Path) -> Result<Summary, HarnessError> {
    let records: Vec<InstanceRecord> = read_jsonl(input)?;
    let reports = verify_records(cfg, &records)?;
    write_jsonl(&out_dir.join("reports.jsonl"), &reports)?;
    let summary = Summary::of(&reports);
    let text =
        serde_json::to_string_pretty(&summary).map_err(|e| HarnessError::Io(e.to_string()))?;
    fs::write(out_dir.join("summary.json"), text + "\n")
        .map_err(|e| HarnessError::Io(e.to_string()))?;
    Ok(summary)
}

fn seed_for(base: u64, kind: usize, i: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(((kind as u64) << 32) | i as u64)
}

/// Generate `count` labeled fixtures per kind (T1 is the unmutated gold
/// chain) at depths cycling through 2, 3, 4.
pub fn generate_fixtures(
    cfg: &RunConfig,
    kinds: &[Category],
    count: usize,
) -> Result<Vec<InstanceRecord>, HarnessError> {
    if count == 0 {
        return Err(HarnessError::Config("count must be at least 1".into()));
    }
    let mut jobs = Vec::new();
    for (ki, kind) in kinds.iter().enumerate() {
        let mutation = match kind {
            Category::T1 => None,
            Category::T2 => Some(MutationKind::T2),
            Category::T3 => Some(MutationKind::T3),
            Category::T4 => Some(MutationKind::T4),
            other => {
                return Err(HarnessError::Config(format!(
                    "cannot generate {other} fixtures (expected T1, T2, T3 or T4)"
                )))
            }
        };
        for i in 0..count {
            jobs.push((
                *kind,
                mutation,
                2 + i % 3,
                seed_for(cfg.seed.unwrap_or(0), ki, i),
            ));
        }
    }
    let verifier = Verifier::new(cfg.engine.clone(), cfg.policy);
    let built = batch::map_ordered(&jobs, cfg.workers, |&(kind, mutation, depth, seed)| {
        let gold = synthesize_gold(depth, seed).map_err(|e| e.to_string())?;
        let gold_cat = verifier.verify_instance(&gold.instance).category;
        if gold_cat != Category::T1 {
            return Err(format!(
                "gold chain for seed {seed} classifies as {gold_cat}"
            ));
        }
        let (inst, labels) = match mutation {
            None => {
                let n = gold.instance.steps.len();
                (gold.instance, vec![crate::verifier::TriLabel::True; n])
            }
            Some(k) => {
                let spec = MutationSpec {
                    kind: k,
                    rng_seed: seed,
                };
                let (inst, labels, _) =
                    mutate_with_labels(&gold, spec).map_err(|e| e.to_string())?;
                (inst, labels)
            }
        };
        let mut rec = InstanceRecord::from_instance(&inst);
        rec.id = format!("{kind}-d{depth}-s{seed}");
        rec.gold_category = Some(kind);
        rec.gold_step_labels = Some(labels);
        Ok(rec)
    });
    built
        .into_iter()
        .collect::<Result<Vec<_>, String>>()
        .map_err(HarnessError::Config)
}

pub fn run_mutate(
    cfg: &RunConfig,
    kinds: &[Category],
    count: usize,
    out: &Path,
) -> Result<usize, HarnessError> {
    let records = generate_fixtures(cfg, kinds, count)?;
    write_jsonl(out, &records)?;
    Ok(records.len())
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn aligned_pairs<'a>(pred: &'a FolFields, gold: &'a FolFields) -> Vec<(&'a str, &'a str)> {
    let mut pairs = vec![(pred.conclusion.as_str(), gold.conclusion.as_str())];
    for (p, g) in [(&pred.premises, &gold.premises), (&pred.steps, &gold.steps)] {
        if p.len() == g.len() {
            pairs.extend(
                p.iter()
                    .map(String::as_str)
                    .zip(g.iter().map(String::as_str)),
            );
        }
    }
    pairs
}

/// Reprint parseable formulas so bracketing style does not affect n-grams.
fn canonical(mut f: FolFields) -> FolFields {
    let reprint = |s: &mut String| {
        if let Ok(p) = parse_formula(s) {
            *s = print_formula(&p);
        }
    };
    f.premises.iter_mut().for_each(reprint);
    f.steps.iter_mut().for_each(reprint);
    reprint(&mut f.conclusion);
    f
}

fn equivalent(a: &str, b: &str, cfg: &RunConfig) -> bool {
    let norm = |s: &str| -> Option<Formula> { normalize(&parse_formula(s).ok()?).ok() };
    match (norm(a), norm(b)) {
        (Some(f), Some(g)) => logical_equivalence(&f, &g, &cfg.engine).unwrap_or(false),
        _ => false,
    }
}

/// Score reports against gold records matched by id.
pub fn compute_metrics(
    cfg: &RunConfig,
    reports: &[ReportRecord],
    gold: &[InstanceRecord],
) -> Result<MetricReport, HarnessError> {
    if gold.is_empty() {
        return Err(HarnessError::Schema("gold file is empty".into()));
    }
    let mut by_id: BTreeMap<&str, &ReportRecord> = BTreeMap::new();
    for r in reports {
        if by_id.insert(r.report.id.as_str(), r).is_some() {
            return Err(HarnessError::Schema(format!(
                "duplicate report id `{}`",
                r.report.id
            )));
        }
    }
    let gold_ids: BTreeSet<&str> = gold.iter().map(|g| g.id.as_str()).collect();
    if gold_ids.len() != gold.len() {
        return Err(HarnessError::Schema("duplicate gold ids".into()));
    }
    let report_ids: BTreeSet<&str> = by_id.keys().copied().collect();
    if gold_ids != report_ids {
        let missing: Vec<_> = gold_ids.difference(&report_ids).take(5).collect();
        let extra: Vec<_> = report_ids.difference(&gold_ids).take(5).collect();
        return Err(HarnessError::Schema(format!(
            "report and gold ids differ (missing reports {missing:?}, unknown reports {extra:?})"
        )));
    }

    let mut pred_cats = Vec::new();
    let mut gold_cats = Vec::new();
    let mut pred_labels = Vec::new();
    let mut gold_labels = Vec::new();
    let mut executions: Vec<ExecutionRecord> = Vec::new();
    let mut bleu = Vec::new();
    let mut le = Vec::new();
    for g in gold {
        let r = by_id[g.id.as_str()];
        if let Some(c) = g.gold_category {
            pred_cats.push(r.report.category);
            gold_cats.push(c);
        }
        if let (Some(gl), false) = (&g.gold_step_labels, r.report.category == Category::Error) {
            let expected: Option<Vec<_>> = match &r.steps_kept {
                Some(kept) => kept.iter().map(|&i| gl.get(i).copied()).collect(),
                None => Some(gl.clone()),
            };
            if let Some(expected) = expected.filter(|e| e.len() == r.report.step_labels.len()) {
                gold_labels.extend(expected);
                pred_labels.extend(r.report.step_labels.iter().copied());
            }
        }
        if let Some(e) = r.execution {
            executions.push(e);
        }
        if let (Some(pred), Some(reference)) = (&r.translated_fol, g.fol().map(canonical)) {
            for (a, b) in aligned_pairs(pred, &reference) {
                if let Ok(s) = fol_bleu(a, b) {
                    bleu.push(s);
                }
                le.push(if equivalent(a, b, cfg) { 1.0 } else { 0.0 });
            }
        }
    }
    Ok(MetricReport {
        instances: gold.len(),
        execution_rate: execution_rate(&executions).ok(),
        execution_accuracy: execution_accuracy(&executions).ok(),
        fol_bleu: mean(&bleu),
        logical_equivalence_rate: mean(&le),
        macro_f1: macro_f1(&pred_labels, &gold_labels).ok(),
        confusion: category_confusion(&pred_cats, &gold_cats).ok(),
    })
}

pub fn run_metrics(
    cfg: &RunConfig,
    reports: &Path,
    gold: &Path,
) -> Result<MetricReport, HarnessError> {
    let r: Vec<ReportRecord> = read_jsonl(reports)?;
    let g: Vec<InstanceRecord> = read_jsonl(gold)?;
    compute_metrics(cfg, &r, &g)
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Write `<id>.p` for every record plus `<id>.step<k>.pos.p` and
/// `<id>.step<k>.neg.p` for each step (1-based). Returns the file count.
pub fn run_tptp_export(input: &Path, out_dir: &Path) -> Result<usize, HarnessError> {
    let records: Vec<InstanceRecord> = read_jsonl(input)?;
    let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", out_dir.display()));
    fs::create_dir_all(out_dir).map_err(io)?;
    let mut written = 0;
    for r in &records {
        if r.fol().is_none() {
            return Err(HarnessError::Schema(format!(
                "`{}` has no FOL fields",
                r.id
            )));
        }
        r.validate()
            .map_err(|e| HarnessError::Schema(format!("`{}`: {e}", r.id)))?;
        let inst = r
            .to_instance()
            .map_err(|e| HarnessError::Schema(format!("`{}`: {e}", r.id)))?;
        let stem = file_stem(&r.id);
        let emit = |conjecture: &Formula| {
            emit_problem(&TptpProblem::new(&inst.premises, Some(conjecture)))
                .map_err(|e| HarnessError::Schema(format!("`{}`: {e}", r.id)))
        };
        fs::write(out_dir.join(format!("{stem}.p")), emit(&inst.conclusion)?).map_err(io)?;
        written += 1;
        for (k, step) in inst.steps.iter().enumerate() {
            let k = k + 1;
            fs::write(out_dir.join(format!("{stem}.step{k}.pos.p")), emit(step)?).map_err(io)?;
            fs::write(
                out_dir.join(format!("{stem}.step{k}.neg.p")),
                emit(&Formula::not(step.clone()))?,
            )
            .map_err(io)?;
            written += 2;
        }
    }
    Ok(written)
}
