//! Batch evaluation: one report per record per requested metric, with
//! per-record failure isolation and order-stable output.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rayon::prelude::*;

use crate::config::EvalConfig;
use crate::error::{Error, Result};
use crate::harness::{
    load_dataset, metric_pairing, DatasetDiagnostics, EvaluationRecord, Metric, MetricOutcome,
    MetricReport,
};
use crate::providers::{ProviderSet, SourceTag};
use crate::scoring::score_record_pairwise;

/// Whole-record failure: (record id, error text, provider-caused?).
pub type RecordFailure = (String, String, bool);

/// Per-metric distribution summary over the scored records.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    pub metric: Metric,
    pub scored: usize,
    pub skipped: usize,
    pub mean_multi_hop: f64,
    pub median_multi_hop: f64,
    pub mean_community: f64,
    pub median_community: f64,
    pub mean_community_eq2: f64,
    pub median_community_eq2: f64,
}

impl MetricSummary {
    pub fn to_line(&self) -> String {
        format!(
            "{}: n={} skipped={} multi_hop mean={:.4} median={:.4} community mean={:.4} median={:.4} community_eq2 mean={:.4} median={:.4}",
            self.metric,
            self.scored,
            self.skipped,
            self.mean_multi_hop,
            self.median_multi_hop,
            self.mean_community,
            self.median_community,
            self.mean_community_eq2,
            self.median_community_eq2
        )
    }
}

/// Full outcome of a batch evaluation.
#[derive(Debug)]
pub struct EvaluationOutput {
    /// Reports sorted by record id.
    pub reports: Vec<MetricReport>,
    pub failed: Vec<RecordFailure>,
    pub diagnostics: DatasetDiagnostics,
    pub summaries: Vec<MetricSummary>,
}

impl EvaluationOutput {
    /// Serialize the reports as JSONL, one record per line.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for report in &self.reports {
            out.push_str(&report.to_jsonl_line()?);
            out.push('\n');
        }
        Ok(out)
    }
}

/// Evaluate one record across the requested metrics. Extraction results
/// are memoized per text field, so a text shared by several pairings is
/// extracted once.
fn evaluate_record(
    record: &EvaluationRecord,
    metrics: &[Metric],
    providers: &ProviderSet,
    cfg: &EvalConfig,
) -> Result<MetricReport> {
    let started = std::time::Instant::now();
    let mut extracted: HashMap<(String, SourceTag), std::sync::Arc<Vec<crate::graph::Triplet>>> =
        HashMap::new();
    let mut extract = |text: &str, tag: SourceTag| -> Result<std::sync::Arc<Vec<crate::graph::Triplet>>> {
        if let Some(hit) = extracted.get(&(text.to_string(), tag)) {
            return Ok(std::sync::Arc::clone(hit));
        }
        let triplets = std::sync::Arc::new(providers.extract(text, tag)?);
        extracted.insert((text.to_string(), tag), std::sync::Arc::clone(&triplets));
        Ok(triplets)
    };

    let mut outcomes: BTreeMap<Metric, MetricOutcome> = BTreeMap::new();
    for &metric in metrics {
        match metric_pairing(metric, record) {
            Err(reason) => {
                outcomes.insert(
                    metric,
                    MetricOutcome::Skipped {
                        skipped: reason.to_string(),
                    },
                );
            }
            Ok((input_text, context_text)) => {
                let input = extract(&input_text, SourceTag::Input)?;
                let context = extract(&context_text, SourceTag::Context)?;
                let scored = score_record_pairwise(&input, &context, providers.similarity(), cfg)?;
                outcomes.insert(metric, MetricOutcome::Scored(scored));
            }
        }
    }
    Ok(MetricReport {
        id: record.id.clone(),
        metrics: outcomes,
        timing_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Evaluate records on a bounded worker pool. Per-record failures never
/// affect other records; output order is stable by record id.
pub fn evaluate_records(
    records: &[EvaluationRecord],
    metrics: &[Metric],
    providers: &ProviderSet,
    cfg: &EvalConfig,
) -> Result<(Vec<MetricReport>, Vec<RecordFailure>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.effective_parallelism())
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;

    let results: Vec<(String, Result<MetricReport>)> = pool.install(|| {
        records
            .par_iter()
            .map(|record| {
                (
                    record.id.clone(),
                    evaluate_record(record, metrics, providers, cfg),
                )
            })
            .collect()
    });

    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for (id, result) in results {
        match result {
            Ok(report) => reports.push(report),
            Err(e) => {
                let provider_caused = matches!(
                    e,
                    Error::Provider { .. } | Error::ProviderContract(_) | Error::ExtractionFormat { .. }
                );
                log::warn!("record '{id}' failed: {e}");
                failed.push((id, e.to_string(), provider_caused));
            }
        }
    }
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    failed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((reports, failed))
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Summarize score distributions per metric.
pub fn summarize(reports: &[MetricReport], metrics: &[Metric]) -> Vec<MetricSummary> {
    metrics
        .iter()
        .map(|&metric| {
            let mut multi = Vec::new();
            let mut alg3 = Vec::new();
            let mut eq2 = Vec::new();
            let mut skipped = 0;
            for report in reports {
                match report.metrics.get(&metric) {
                    Some(MetricOutcome::Scored(s)) => {
                        multi.push(s.scores.multi_hop);
                        alg3.push(s.scores.community_alg3);
                        eq2.push(s.scores.community_eq2);
                    }
                    Some(MetricOutcome::Skipped { .. }) => skipped += 1,
                    None => {}
                }
            }
            let mean = |xs: &[f64]| {
                if xs.is_empty() {
                    0.0
                } else {
                    xs.iter().sum::<f64>() / xs.len() as f64
                }
            };
            let mut sm = multi.clone();
            let mut sa = alg3.clone();
            let mut se = eq2.clone();
            for v in [&mut sm, &mut sa, &mut se] {
                v.sort_by(f64::total_cmp);
            }
            MetricSummary {
                metric,
                scored: multi.len(),
                skipped,
                mean_multi_hop: mean(&multi),
                median_multi_hop: median(&sm),
                mean_community: mean(&alg3),
                median_community: median(&sa),
                mean_community_eq2: mean(&eq2),
                median_community_eq2: median(&se),
            }
        })
        .collect()
}

/// Load a JSONL dataset and evaluate every record on the requested
/// metrics. Aborts when more than half of the dataset is unusable
/// (malformed lines plus failed records).
pub fn evaluate_dataset(
    path: &Path,
    metrics: &[Metric],
    providers: &ProviderSet,
    cfg: &EvalConfig,
) -> Result<EvaluationOutput> {
    let loaded = load_dataset(path)?;
    let (reports, failed) = evaluate_records(&loaded.records, metrics, providers, cfg)?;

    let unusable = loaded.diagnostics.malformed.len() + failed.len();
    let total = loaded.diagnostics.total_lines.max(1);
    if unusable * 2 > total {
        let provider_failures = failed.iter().filter(|(_, _, p)| *p).count();
        let message = format!(
            "{unusable} of {total} records unusable ({} malformed, {} failed)",
            loaded.diagnostics.malformed.len(),
            failed.len()
        );
        return Err(if provider_failures * 2 > failed.len() {
            Error::Provider {
                message,
                attempts: 1,
            }
        } else {
            Error::Data(message)
        });
    }

    let summaries = summarize(&reports, metrics);
    Ok(EvaluationOutput {
        reports,
        failed,
        diagnostics: loaded.diagnostics,
        summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn mock_providers(dir: &Path) -> (ProviderSet, EvalConfig) {
        let cfg = EvalConfig {
            cache_dir: dir.join("cache"),
            ..EvalConfig::default()
        };
        (ProviderSet::from_config(&cfg).unwrap(), cfg)
    }

    fn record(id: &str, question: &str, answer: &str, contexts: &[&str], reference: Option<&str>) -> EvaluationRecord {
        EvaluationRecord {
            id: id.to_string(),
            question: question.to_string(),
            answer: answer.to_string(),
            contexts: contexts.iter().map(|s| s.to_string()).collect(),
            reference: reference.map(|s| s.to_string()),
            wrong_answer: None,
            baseline_scores: None,
            human_scores: None,
        }
    }

    #[test]
    fn three_records_all_metrics_gives_three_reports_of_four() {
        let dir = tempfile::tempdir().unwrap();
        let (providers, cfg) = mock_providers(dir.path());
        let records = vec![
            record("a", "P|asks|X", "P|answers|X", &["P|holds|X"], Some("P|answers|X")),
            record("b", "Q|asks|Y", "Q|answers|Y", &["Q|holds|Y"], Some("Q|answers|Y")),
            record("c", "R|asks|Z", "R|answers|Z", &["R|holds|Z"], Some("R|answers|Z")),
        ];
        let (reports, failed) =
            evaluate_records(&records, &Metric::ALL, &providers, &cfg).unwrap();
        assert!(failed.is_empty());
        assert_eq!(reports.len(), 3);
        for report in &reports {
            assert_eq!(report.metrics.len(), 4);
        }
    }

    #[test]
    fn verbatim_reference_answer_scores_full_factual_correctness() {
        let dir = tempfile::tempdir().unwrap();
        let (providers, cfg) = mock_providers(dir.path());
        let records = vec![record(
            "a",
            "Hero|asks|Castle",
            "Hero|guards|Castle",
            &["Hero|guards|Castle"],
            Some("Hero|guards|Castle"),
        )];
        let (reports, _) = evaluate_records(&records, &[Metric::FactualCorrectness], &providers, &cfg).unwrap();
        let outcome = reports[0].metrics[&Metric::FactualCorrectness].scored().unwrap();
        assert_eq!(outcome.scores.multi_hop, 1.0);
    }

    #[test]
    fn missing_reference_is_skipped_not_failed() {
        let dir = tempfile::tempdir().unwrap();
        let (providers, cfg) = mock_providers(dir.path());
        let records = vec![record("a", "P|asks|X", "P|answers|X", &[], None)];
        let (reports, failed) =
            evaluate_records(&records, &[Metric::FactualCorrectness], &providers, &cfg).unwrap();
        assert!(failed.is_empty());
        assert!(matches!(
            reports[0].metrics[&Metric::FactualCorrectness],
            MetricOutcome::Skipped { .. }
        ));
    }

    #[test]
    fn per_record_failures_are_isolated() {
        let dir = tempfile::tempdir().unwrap();
        let (providers, cfg) = mock_providers(dir.path());
        let records = vec![
            record("bad", "not the mock format", "A|r|B", &[], None),
            record("good", "P|asks|X", "P|answers|X", &[], None),
        ];
        let (reports, failed) =
            evaluate_records(&records, &[Metric::AnswerRelevancy], &providers, &cfg).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].id, "good");
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].0, "bad");
        assert!(failed[0].2, "mock format error counts as provider-caused");
    }

    #[test]
    fn dataset_with_majority_failures_aborts() {
        let dir = tempfile::tempdir().unwrap();
        let (providers, cfg) = mock_providers(dir.path());
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, r#"{{"id":"a","question":"broken text","answer":"A|r|B"}}"#).unwrap();
        writeln!(f, r#"{{"id":"b","question":"also broken","answer":"A|r|B"}}"#).unwrap();
        writeln!(f, r#"{{"id":"c","question":"Q|asks|X","answer":"A|r|X"}}"#).unwrap();
        let err = evaluate_dataset(f.path(), &[Metric::AnswerRelevancy], &providers, &cfg).unwrap_err();
        assert!(matches!(err, Error::Provider { .. }), "got {err}");
    }

    #[test]
    fn failing_neighbors_leave_scores_untouched() {
        let dir = tempfile::tempdir().unwrap();
        let (providers, cfg) = mock_providers(dir.path());
        let good = record("good", "P|asks|X", "P|answers|X", &["P|holds|X"], None);
        let bad = record("bad", "this does not parse", "A|r|B", &[], None);

        let (alone, _) =
            evaluate_records(std::slice::from_ref(&good), &Metric::ALL, &providers, &cfg).unwrap();
        let (together, failed) =
            evaluate_records(&[bad, good], &Metric::ALL, &providers, &cfg).unwrap();
        assert_eq!(failed.len(), 1);
        assert_eq!(together.len(), 1);
        assert_eq!(
            serde_json::to_string(&alone[0]).unwrap(),
            serde_json::to_string(&together[0]).unwrap(),
            "a failing neighbor changed another record's scores"
        );
    }

    #[test]
    fn reports_are_sorted_by_record_id() {
        let dir = tempfile::tempdir().unwrap();
        let (providers, cfg) = mock_providers(dir.path());
        let records = vec![
            record("zeta", "Q|asks|X", "A|r|X", &[], None),
            record("alpha", "Q|asks|Y", "A|r|Y", &[], None),
        ];
        let (reports, _) = evaluate_records(&records, &[Metric::AnswerRelevancy], &providers, &cfg).unwrap();
        assert_eq!(reports[0].id, "alpha");
        assert_eq!(reports[1].id, "zeta");
    }
}
