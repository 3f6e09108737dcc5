//! Sensitivity experiments: re-evaluate a dataset with the generated
//! answer replaced by the reference answer or by a deliberately wrong
//! one, and compare the score distributions.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::EvalConfig;
use crate::error::{Error, Result};
use crate::harness::{
    evaluate::{summarize, EvaluationOutput},
    evaluate_records, load_dataset, EvaluationRecord, Metric,
};
use crate::providers::ProviderSet;

/// Which substitution to apply to the answer field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensitivityMode {
    /// Replace the answer with the ground-truth reference.
    Reference,
    /// Replace the answer with a wrong one: the record's explicit
    /// `wrong_answer` when present, otherwise another record's answer via
    /// a seeded derangement.
    Wrong,
}

impl std::str::FromStr for SensitivityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" => Ok(SensitivityMode::Reference),
            "wrong" => Ok(SensitivityMode::Wrong),
            other => Err(Error::Config(format!(
                "unknown sensitivity mode '{other}' (expected reference or wrong)"
            ))),
        }
    }
}

impl SensitivityMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SensitivityMode::Reference => "reference",
            SensitivityMode::Wrong => "wrong",
        }
    }
}

/// Seeded derangement over record indices: shuffle the indices into a
/// random order, then map each one to its successor along the cycle.
/// Every index moves, and a fixed seed reproduces the mapping.
fn derangement(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_D15C);
    let mut cycle: Vec<usize> = (0..n).collect();
    cycle.shuffle(&mut rng);
    let mut mapping = vec![0; n];
    for pos in 0..n {
        mapping[cycle[pos]] = cycle[(pos + 1) % n];
    }
    mapping
}

/// Substitute answers per mode. Records without a substitution source are
/// dropped and reported as (id, reason) diagnostics.
fn substitute(
    records: &[EvaluationRecord],
    mode: SensitivityMode,
    seed: u64,
) -> (Vec<EvaluationRecord>, Vec<(String, String)>) {
    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    match mode {
        SensitivityMode::Reference => {
            for record in records {
                match &record.reference {
                    Some(reference) => {
                        let mut sub = record.clone();
                        sub.answer = reference.clone();
                        kept.push(sub);
                    }
                    None => skipped.push((
                        record.id.clone(),
                        "no reference available for substitution".to_string(),
                    )),
                }
            }
        }
        SensitivityMode::Wrong => {
            let explicit: Vec<bool> = records.iter().map(|r| r.wrong_answer.is_some()).collect();
            let needs_derangement = explicit.iter().filter(|&&e| !e).count();
            if needs_derangement == 1 && records.len() == 1 {
                let record = &records[0];
                skipped.push((
                    record.id.clone(),
                    "cannot derange a single record and no wrong_answer given".to_string(),
                ));
                return (kept, skipped);
            }
            let mapping = derangement(records.len(), seed);
            for (idx, record) in records.iter().enumerate() {
                let mut sub = record.clone();
                sub.answer = match &record.wrong_answer {
                    Some(wrong) => wrong.clone(),
                    None => records[mapping[idx]].answer.clone(),
                };
                kept.push(sub);
            }
        }
    }
    (kept, skipped)
}

/// Run the sensitivity experiment over a dataset file. Skipped records
/// are folded into the per-metric skip counts of the summary output.
pub fn sensitivity_run(
    path: &Path,
    mode: SensitivityMode,
    metrics: &[Metric],
    providers: &ProviderSet,
    cfg: &EvalConfig,
) -> Result<(EvaluationOutput, Vec<(String, String)>)> {
    let loaded = load_dataset(path)?;
    let (substituted, substitution_skips) = substitute(&loaded.records, mode, cfg.seed);
    for (id, reason) in &substitution_skips {
        log::warn!("sensitivity: record '{id}' skipped: {reason}");
    }
    let (reports, failed) = evaluate_records(&substituted, metrics, providers, cfg)?;
    let summaries = summarize(&reports, metrics);
    Ok((
        EvaluationOutput {
            reports,
            failed,
            diagnostics: loaded.diagnostics,
            summaries,
        },
        substitution_skips,
    ))
}
