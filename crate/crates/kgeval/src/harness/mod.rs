//! Dataset ingestion, metric pairings, batch evaluation, correlation
//! statistics, and the answer-substitution sensitivity runner.

mod correlate;
mod dataset;
mod evaluate;
mod sensitivity;

pub use correlate::{
    correlate_files, pearson, spearman, CorrOutcome, CorrelationMethod, CorrelationResult,
};
pub use dataset::{load_dataset, DatasetDiagnostics, LoadedDataset};
pub use evaluate::{evaluate_dataset, evaluate_records, EvaluationOutput, MetricSummary};
pub use sensitivity::{sensitivity_run, SensitivityMode};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::ScoredPair;

/// The four supported metric pairings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    ContextRelevancy,
    FactualCorrectness,
    Faithfulness,
    AnswerRelevancy,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::ContextRelevancy,
        Metric::FactualCorrectness,
        Metric::Faithfulness,
        Metric::AnswerRelevancy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::ContextRelevancy => "context_relevancy",
            Metric::FactualCorrectness => "factual_correctness",
            Metric::Faithfulness => "faithfulness",
            Metric::AnswerRelevancy => "answer_relevancy",
        }
    }

    /// Parse a comma-separated metric list; `all` expands to every metric.
    pub fn parse_list(spec: &str) -> Result<Vec<Metric>> {
        if spec.trim() == "all" {
            return Ok(Metric::ALL.to_vec());
        }
        let mut out = Vec::new();
        for part in spec.split(',') {
            let metric: Metric = part.trim().parse()?;
            if !out.contains(&metric) {
                out.push(metric);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("no metrics requested".to_string()));
        }
        Ok(out)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "context_relevancy" => Ok(Metric::ContextRelevancy),
            "factual_correctness" => Ok(Metric::FactualCorrectness),
            "faithfulness" => Ok(Metric::Faithfulness),
            "answer_relevancy" => Ok(Metric::AnswerRelevancy),
            other => Err(Error::Config(format!(
                "unknown metric '{other}' (expected one of context_relevancy, \
                 factual_correctness, faithfulness, answer_relevancy)"
            ))),
        }
    }
}

/// One dataset row.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationRecord {
    pub id: String,
    pub question: String,
    pub answer: String,
    #[serde(default)]
    pub contexts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    /// Explicit incorrect answer for wrong-mode sensitivity runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wrong_answer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_scores: Option<BTreeMap<Metric, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_scores: Option<BTreeMap<Metric, f64>>,
}

impl EvaluationRecord {
    pub fn joined_contexts(&self) -> String {
        self.contexts.join("\n\n")
    }
}

/// Resolve which texts play the input (first) and context (second) roles
/// for a metric. The text whose claims must be supported plays the input
/// role. Returns `Err` with a skip reason when a required field is absent.
pub fn metric_pairing(metric: Metric, record: &EvaluationRecord) -> Result<(String, String)> {
    match metric {
        Metric::ContextRelevancy => Ok((record.question.clone(), record.joined_contexts())),
        Metric::Faithfulness => Ok((record.answer.clone(), record.joined_contexts())),
        Metric::AnswerRelevancy => Ok((record.answer.clone(), record.question.clone())),
        Metric::FactualCorrectness => match &record.reference {
            Some(reference) => Ok((record.answer.clone(), reference.clone())),
            None => Err(Error::Data(format!(
                "record '{}' has no reference; factual_correctness skipped",
                record.id
            ))),
        },
    }
}

/// Result of scoring one metric on one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricOutcome {
    Scored(ScoredPair),
    Skipped { skipped: String },
}

impl MetricOutcome {
    pub fn scored(&self) -> Option<&ScoredPair> {
        match self {
            MetricOutcome::Scored(s) => Some(s),
            MetricOutcome::Skipped { .. } => None,
        }
    }
}

/// All requested metrics for one record, each present exactly once.
/// Timing is tracked for diagnostics but kept out of the serialized line
/// so score files stay byte-reproducible.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub id: String,
    pub metrics: BTreeMap<Metric, MetricOutcome>,
    #[serde(skip)]
    pub timing_ms: f64,
}

impl MetricReport {
    /// Serialize as one JSONL line (deterministic field order).
    pub fn to_jsonl_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}
