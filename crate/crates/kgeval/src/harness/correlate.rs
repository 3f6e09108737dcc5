//! Pearson and Spearman correlation of score files against baseline or
//! human score sidecars, joined by record id.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{Metric, MetricOutcome, MetricReport};

/// Correlation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMethod {
    Pearson,
    Spearman,
}

impl std::str::FromStr for CorrelationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pearson" => Ok(CorrelationMethod::Pearson),
            "spearman" => Ok(CorrelationMethod::Spearman),
            other => Err(Error::Config(format!(
                "unknown correlation method '{other}' (expected pearson or spearman)"
            ))),
        }
    }
}

impl CorrelationMethod {
    pub fn parse_list(spec: &str) -> Result<Vec<CorrelationMethod>> {
        let mut out = Vec::new();
        for part in spec.split(',') {
            let m = part.trim().parse()?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("no correlation methods requested".to_string()));
        }
        Ok(out)
    }
}

/// A coefficient, or the reason there is none.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrOutcome {
    Defined(f64),
    /// One side has zero variance; the coefficient does not exist.
    ZeroVariance,
    /// Fewer than two paired samples.
    InsufficientData,
}

impl CorrOutcome {
    pub fn coefficient(self) -> Option<f64> {
        match self {
            CorrOutcome::Defined(v) => Some(v),
            _ => None,
        }
    }

    fn status(self) -> &'static str {
        match self {
            CorrOutcome::Defined(_) => "ok",
            CorrOutcome::ZeroVariance => "undefined_zero_variance",
            CorrOutcome::InsufficientData => "insufficient_data",
        }
    }
}

/// Pearson product-moment correlation: cov / (sigma_a * sigma_b).
pub fn pearson(x: &[f64], y: &[f64]) -> CorrOutcome {
    assert_eq!(x.len(), y.len(), "paired vectors must have equal length");
    let n = x.len();
    if n < 2 {
        return CorrOutcome::InsufficientData;
    }
    let mean_x = x.iter().sum::<f64>() / n as f64;
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return CorrOutcome::ZeroVariance;
    }
    let r = cov / (var_x * var_y).sqrt();
    CorrOutcome::Defined(r.clamp(-1.0, 1.0))
}

/// Fractional ranks (1-based); ties receive the average of their ranks.
fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j hold equal values; average their 1-based ranks.
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson over fractional ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> CorrOutcome {
    assert_eq!(x.len(), y.len(), "paired vectors must have equal length");
    if x.len() < 2 {
        return CorrOutcome::InsufficientData;
    }
    pearson(&fractional_ranks(x), &fractional_ranks(y))
}

/// One correlation row of the output report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub metric: Metric,
    /// Which of our sub-scores was correlated.
    pub score: String,
    pub method: CorrelationMethod,
    pub coefficient: Option<f64>,
    pub n: usize,
    pub status: String,
}

/// Sidecar line format: external scores keyed by record id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SidecarScores {
    pub id: String,
    pub scores: BTreeMap<Metric, f64>,
}

/// Full correlation report, including join diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub results: Vec<CorrelationResult>,
    pub matched_records: usize,
    pub unmatched_score_ids: Vec<String>,
    pub unmatched_against_ids: Vec<String>,
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(line)
            .map_err(|e| Error::Data(format!("{}:{}: {e}", path.display(), idx + 1)))?;
        out.push(value);
    }
    Ok(out)
}

const SUB_SCORES: [&str; 3] = ["multi_hop", "community", "community_eq2"];

fn sub_score(outcome: &MetricOutcome, which: &str) -> Option<f64> {
    let scored = outcome.scored()?;
    Some(match which {
        "multi_hop" => scored.scores.multi_hop,
        "community" => scored.scores.community_alg3,
        "community_eq2" => scored.scores.community_eq2,
        _ => unreachable!("sub-score list is fixed"),
    })
}

/// Correlate a scores JSONL (our output format) against a sidecar of
/// baseline/human scores, per metric, per sub-score, per method.
pub fn correlate_files(
    scores_path: &Path,
    against_path: &Path,
    methods: &[CorrelationMethod],
) -> Result<CorrelationReport> {
    let ours: Vec<MetricReport> = read_jsonl(scores_path)?;
    let theirs: Vec<SidecarScores> = read_jsonl(against_path)?;

    let their_index: BTreeMap<&str, &SidecarScores> =
        theirs.iter().map(|s| (s.id.as_str(), s)).collect();
    let our_ids: std::collections::BTreeSet<&str> =
        ours.iter().map(|r| r.id.as_str()).collect();

    let unmatched_score_ids: Vec<String> = ours
        .iter()
        .filter(|r| !their_index.contains_key(r.id.as_str()))
        .map(|r| r.id.clone())
        .collect();
    let unmatched_against_ids: Vec<String> = theirs
        .iter()
        .filter(|s| !our_ids.contains(s.id.as_str()))
        .map(|s| s.id.clone())
        .collect();
    let matched_records = ours.len() - unmatched_score_ids.len();
    if matched_records == 0 {
        return Err(Error::Data(format!(
            "no record ids match between {} and {} (ours: {:?}, theirs: {:?})",
            scores_path.display(),
            against_path.display(),
            unmatched_score_ids,
            unmatched_against_ids
        )));
    }

    let mut results = Vec::new();
    for metric in Metric::ALL {
        for which in SUB_SCORES {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for report in &ours {
                let Some(their) = their_index.get(report.id.as_str()) else {
                    continue;
                };
                let (Some(outcome), Some(&external)) =
                    (report.metrics.get(&metric), their.scores.get(&metric))
                else {
                    continue;
                };
                if let Some(value) = sub_score(outcome, which) {
                    if value.is_finite() && external.is_finite() {
                        xs.push(value);
                        ys.push(external);
                    }
                }
            }
            if xs.is_empty() {
                continue;
            }
            for &method in methods {
                let outcome = match method {
                    CorrelationMethod::Pearson => pearson(&xs, &ys),
                    CorrelationMethod::Spearman => spearman(&xs, &ys),
                };
                results.push(CorrelationResult {
                    metric,
                    score: which.to_string(),
                    method,
                    coefficient: outcome.coefficient(),
                    n: xs.len(),
                    status: outcome.status().to_string(),
                });
            }
        }
    }

    Ok(CorrelationReport {
        results,
        matched_records,
        unmatched_score_ids,
        unmatched_against_ids,
    })
}
