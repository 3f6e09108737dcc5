//! Command-line interface: evaluate, correlate, sensitivity, export-graph.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use kgeval::config::{EvalConfig, ProviderKind};
use kgeval::error::{Error, Result};
use kgeval::export;
use kgeval::graph::build_entity_relation_graph;
use kgeval::harness::{
    correlate_files, evaluate_dataset, metric_pairing, sensitivity_run, CorrelationMethod,
    Metric, SensitivityMode,
};
use kgeval::providers::{ProviderSet, SourceTag};

#[derive(Parser)]
#[command(
    name = "kgeval",
    version,
    about = "Score RAG outputs via entity-relation graphs: multi-hop reachability and community overlap"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// key=value config file; command-line flags win over it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Similarity threshold for SIMILAR edges [default: 0.7]
    #[arg(long, global = true)]
    tau: Option<f64>,

    /// Path cost budget for multi-hop reachability [default: 0.5]
    #[arg(long, global = true)]
    delta: Option<f64>,

    /// RNG seed (Louvain node order, wrong-answer derangement) [default: 42]
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Louvain resolution parameter [default: 1.0]
    #[arg(long, global = true)]
    resolution: Option<f64>,

    /// Provider backends: mock or live [default: mock]
    #[arg(long, global = true)]
    providers: Option<String>,

    /// Weight of structural (intra-triplet) edges [default: 0.9]
    #[arg(long, global = true)]
    structural_weight: Option<f64>,

    /// Cost of structural edges [default: 0.1]
    #[arg(long, global = true)]
    structural_cost: Option<f64>,

    /// Provider response cache directory [default: .kgeval-cache]
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Skip cache reads; fresh results still refresh the cache
    #[arg(long, global = true)]
    no_cache: bool,

    /// Walk edges only in their stored direction during path search
    #[arg(long, global = true)]
    directed_traversal: bool,

    /// Worker pool size; 0 = one per logical core [default: 0]
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a JSONL dataset and emit per-record scores
    Evaluate {
        /// Input dataset (JSONL, one record per line)
        #[arg(long)]
        input: PathBuf,
        /// Metrics: `all` or a comma-separated subset
        #[arg(long, default_value = "all")]
        metrics: String,
        /// Output scores JSONL (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correlate a scores file against baseline or human score sidecars
    Correlate {
        /// Scores JSONL produced by `kgeval evaluate`
        #[arg(long)]
        scores: PathBuf,
        /// Sidecar JSONL: {"id": ..., "scores": {metric: value}}
        #[arg(long)]
        against: PathBuf,
        /// Comma-separated methods
        #[arg(long, default_value = "pearson,spearman")]
        method: String,
        /// Output JSON report (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-evaluate with substituted answers and compare distributions
    Sensitivity {
        #[arg(long)]
        input: PathBuf,
        /// Substitution mode: reference or wrong
        #[arg(long)]
        mode: String,
        /// Metrics to re-evaluate
        #[arg(long, default_value = "answer_relevancy")]
        metrics: String,
        /// Output JSONL (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export one record's metric graph as DOT or node-link JSON
    ExportGraph {
        #[arg(long)]
        input: PathBuf,
        /// Record id to export
        #[arg(long)]
        record_id: String,
        /// Metric pairing to build the graph for
        #[arg(long, default_value = "faithfulness")]
        metric: String,
        /// Output format: dot or json
        #[arg(long, default_value = "json")]
        format: String,
        /// Attach per-node community and reachability diagnostics (json)
        #[arg(long)]
        diagnostics: bool,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Cli {
    /// Defaults, then config file, then flags.
    fn resolve_config(&self) -> Result<EvalConfig> {
        let mut cfg = EvalConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(v) = self.tau {
            cfg.tau = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.resolution {
            cfg.resolution = v;
        }
        if let Some(v) = &self.providers {
            cfg.providers = v.parse::<ProviderKind>()?;
        }
        if let Some(v) = self.structural_weight {
            cfg.structural_weight = v;
        }
        if let Some(v) = self.structural_cost {
            cfg.structural_cost = v;
        }
        if let Some(v) = &self.cache_dir {
            cfg.cache_dir = v.clone();
        }
        if self.no_cache {
            cfg.no_cache = true;
        }
        if self.directed_traversal {
            cfg.directed_traversal = true;
        }
        if let Some(v) = self.jobs {
            cfg.parallelism = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn run(&self) -> Result<()> {
        let cfg = self.resolve_config()?;
        match &self.command {
            Command::Evaluate { input, metrics, out } => run_evaluate(&cfg, input, metrics, out),
            Command::Correlate {
                scores,
                against,
                method,
                out,
            } => run_correlate(scores, against, method, out),
            Command::Sensitivity {
                input,
                mode,
                metrics,
                out,
            } => run_sensitivity(&cfg, input, mode, metrics, out),
            Command::ExportGraph {
                input,
                record_id,
                metric,
                format,
                diagnostics,
                out,
            } => run_export(&cfg, input, record_id, metric, format, *diagnostics, out),
        }
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn run_evaluate(
    cfg: &EvalConfig,
    input: &Path,
    metrics_spec: &str,
    out: &Option<PathBuf>,
) -> Result<()> {
    let metrics = Metric::parse_list(metrics_spec)?;
    let providers = ProviderSet::from_config(cfg)?;
    let output = evaluate_dataset(input, &metrics, &providers, cfg)?;
    write_output(out, &output.to_jsonl()?)?;

    for summary in &output.summaries {
        eprintln!("{}", summary.to_line());
    }
    let scoring_ms: f64 = output.reports.iter().map(|r| r.timing_ms).sum();
    eprintln!(
        "evaluated {} record(s) in {:.1} ms of scoring time",
        output.reports.len(),
        scoring_ms
    );
    if !output.diagnostics.malformed.is_empty() || !output.failed.is_empty() {
        eprintln!(
            "diagnostics: {} malformed line(s), {} failed record(s)",
            output.diagnostics.malformed.len(),
            output.failed.len()
        );
    }
    Ok(())
}

fn run_correlate(
    scores: &Path,
    against: &Path,
    method_spec: &str,
    out: &Option<PathBuf>,
) -> Result<()> {
    let methods = CorrelationMethod::parse_list(method_spec)?;
    let report = correlate_files(scores, against, &methods)?;
    if !report.unmatched_score_ids.is_empty() || !report.unmatched_against_ids.is_empty() {
        eprintln!(
            "warning: unmatched ids: {:?} (scores side), {:?} (against side)",
            report.unmatched_score_ids, report.unmatched_against_ids
        );
    }
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    write_output(out, &text)
}

#[derive(Serialize)]
struct SensitivityLine<'a> {
    id: &'a str,
    mode: &'a str,
    metrics: &'a std::collections::BTreeMap<Metric, kgeval::harness::MetricOutcome>,
}

fn run_sensitivity(
    cfg: &EvalConfig,
    input: &Path,
    mode_spec: &str,
    metrics_spec: &str,
    out: &Option<PathBuf>,
) -> Result<()> {
    let mode: SensitivityMode = mode_spec.parse()?;
    let metrics = Metric::parse_list(metrics_spec)?;
    let providers = ProviderSet::from_config(cfg)?;
    let (output, skipped) = sensitivity_run(input, mode, &metrics, &providers, cfg)?;

    let mut content = String::new();
    for report in &output.reports {
        let line = SensitivityLine {
            id: &report.id,
            mode: mode.as_str(),
            metrics: &report.metrics,
        };
        content.push_str(&serde_json::to_string(&line)?);
        content.push('\n');
    }
    write_output(out, &content)?;

    if output.reports.is_empty() {
        eprintln!("warning: no records evaluated in {} mode ({} skipped)", mode.as_str(), skipped.len());
    } else {
        for summary in &output.summaries {
            eprintln!("[{}] {}", mode.as_str(), summary.to_line());
        }
    }
    if !skipped.is_empty() {
        eprintln!("skipped {} record(s) lacking a substitution source", skipped.len());
    }
    Ok(())
}

fn run_export(
    cfg: &EvalConfig,
    input: &Path,
    record_id: &str,
    metric_spec: &str,
    format: &str,
    diagnostics: bool,
    out: &Option<PathBuf>,
) -> Result<()> {
    let metric: Metric = metric_spec.parse()?;
    let loaded = kgeval::harness::load_dataset(input)?;
    let record = loaded
        .records
        .iter()
        .find(|r| r.id == record_id)
        .ok_or_else(|| Error::Data(format!("record id '{record_id}' not found in {}", input.display())))?;
    let (input_text, context_text) = metric_pairing(metric, record)?;

    let providers = ProviderSet::from_config(cfg)?;
    let input_triplets = providers.extract(&input_text, SourceTag::Input)?;
    let context_triplets = providers.extract(&context_text, SourceTag::Context)?;
    let graph = build_entity_relation_graph(
        &input_triplets,
        &context_triplets,
        providers.similarity(),
        &cfg.graph_params(),
    )?;

    let content = match format {
        "json" => {
            let doc = if diagnostics {
                export::to_node_link_json_with_diagnostics(&graph, cfg)?
            } else {
                export::to_node_link_json(&graph)
            };
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            text
        }
        "dot" => export::to_dot(&graph),
        other => {
            return Err(Error::Config(format!(
                "unknown export format '{other}' (expected dot or json)"
            )))
        }
    };
    write_output(out, &content)
}
