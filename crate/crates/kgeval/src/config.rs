//! Run configuration: thresholds, structural constants, provider settings.
//!
//! Values are resolved in three layers: built-in defaults, then a
//! `key=value` config file, then command-line flags. Flags win.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Which provider backends to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderKind {
    /// Deterministic offline mocks.
    Mock,
    /// HTTP chat-completion and embedding endpoints.
    Live,
}

impl std::str::FromStr for ProviderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mock" => Ok(ProviderKind::Mock),
            "live" => Ok(ProviderKind::Live),
            other => Err(Error::Config(format!(
                "unknown providers value '{other}' (expected 'mock' or 'live')"
            ))),
        }
    }
}

/// Parameters a graph is built with; recorded on the graph itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    /// Similarity threshold for SIMILAR edges.
    pub tau: f64,
    /// Weight assigned to structural (intra-triplet) edges.
    pub structural_weight: f64,
    /// Cost assigned to structural edges.
    pub structural_cost: f64,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            tau: 0.7,
            structural_weight: 0.9,
            structural_cost: 0.1,
        }
    }
}

/// Full evaluation configuration.
#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub tau: f64,
    pub delta: f64,
    pub structural_weight: f64,
    pub structural_cost: f64,
    pub seed: u64,
    pub resolution: f64,
    /// Traverse structural/SIMILAR edges only in their stored direction.
    pub directed_traversal: bool,
    pub providers: ProviderKind,
    pub extract_model: String,
    pub embed_model: String,
    /// Base URL of the chat-completion style endpoint.
    pub api_base: String,
    /// Embedding endpoint URL; the KGEVAL_EMBED_URL env var overrides it.
    pub embed_url: String,
    pub cache_dir: PathBuf,
    /// Bypass cache reads (results are still written back).
    pub no_cache: bool,
    pub max_triplets: usize,
    pub max_text_chars: usize,
    /// Worker pool size; 0 means one worker per logical core.
    pub parallelism: usize,
    /// Global provider request rate limit, requests per second.
    pub rate_limit_rps: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            tau: 0.7,
            delta: 0.5,
            structural_weight: 0.9,
            structural_cost: 0.1,
            seed: 42,
            resolution: 1.0,
            directed_traversal: false,
            providers: ProviderKind::Mock,
            extract_model: "gpt-4o-mini".to_string(),
            embed_model: "all-MiniLM-L6-v2".to_string(),
            api_base: "https://api.openai.com/v1".to_string(),
            embed_url: "https://api.openai.com/v1/embeddings".to_string(),
            cache_dir: PathBuf::from(".kgeval-cache"),
            no_cache: false,
            max_triplets: 64,
            max_text_chars: 32_000,
            parallelism: 0,
            rate_limit_rps: 4.0,
        }
    }
}

impl EvalConfig {
    /// Graph-construction parameters slice of this config.
    pub fn graph_params(&self) -> GraphParams {
        GraphParams {
            tau: self.tau,
            structural_weight: self.structural_weight,
            structural_cost: self.structural_cost,
        }
    }

    /// Apply one `key=value` setting. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("bad value '{value}' for key '{key}'")))
        }
        match key {
            "tau" => self.tau = num(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "structural_weight" => self.structural_weight = num(key, value)?,
            "structural_cost" => self.structural_cost = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "resolution" => self.resolution = num(key, value)?,
            "directed_traversal" => self.directed_traversal = num(key, value)?,
            "providers" => self.providers = value.parse()?,
            "extract_model" => self.extract_model = value.to_string(),
            "embed_model" => self.embed_model = value.to_string(),
            "api_base" => self.api_base = value.to_string(),
            "embed_url" => self.embed_url = value.to_string(),
            "cache_dir" => self.cache_dir = PathBuf::from(value),
            "no_cache" => self.no_cache = num(key, value)?,
            "max_triplets" => self.max_triplets = num(key, value)?,
            "max_text_chars" => self.max_text_chars = num(key, value)?,
            "parallelism" => self.parallelism = num(key, value)?,
            "rate_limit_rps" => self.rate_limit_rps = num(key, value)?,
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Load settings from a `key=value` file ('#' starts a comment).
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Validate value ranges. Called once after all layers are applied.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.tau) || self.tau.is_nan() {
            return Err(Error::Config(format!("tau must lie in [0,1], got {}", self.tau)));
        }
        if self.delta < 0.0 || self.delta.is_nan() {
            return Err(Error::Config(format!("delta must be >= 0, got {}", self.delta)));
        }
        if !(self.structural_weight > 0.0 && self.structural_weight <= 1.0) {
            return Err(Error::Config(format!(
                "structural_weight must lie in (0,1], got {}",
                self.structural_weight
            )));
        }
        if !(0.0..1.0).contains(&self.structural_cost) {
            return Err(Error::Config(format!(
                "structural_cost must lie in [0,1), got {}",
                self.structural_cost
            )));
        }
        if self.resolution <= 0.0 || self.resolution.is_nan() {
            return Err(Error::Config(format!(
                "resolution must be > 0, got {}",
                self.resolution
            )));
        }
        if self.rate_limit_rps <= 0.0 || self.rate_limit_rps.is_nan() {
            return Err(Error::Config(format!(
                "rate_limit_rps must be > 0, got {}",
                self.rate_limit_rps
            )));
        }
        if self.max_text_chars == 0 {
            return Err(Error::Config("max_text_chars must be positive".to_string()));
        }
        if self.max_triplets == 0 {
            return Err(Error::Config("max_triplets must be positive".to_string()));
        }
        Ok(())
    }

    /// Effective worker count for batch evaluation.
    pub fn effective_parallelism(&self) -> usize {
        if self.parallelism == 0 {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        } else {
            self.parallelism
        }
    }
}
