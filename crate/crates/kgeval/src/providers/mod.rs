//! Provider contracts: LLM-backed triplet extraction and sentence-embedding
//! similarity, each with a deterministic offline mock, plus a persistent
//! response cache so reruns are reproducible and cheap.

mod cache;
mod http;
mod mock;

pub use cache::{CacheKey, DiskCache};
pub use http::{HttpEmbedder, HttpExtractor, RateLimiter};
pub use mock::{HashEmbedder, MockExtractor, TableSimilarityProvider};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::{EvalConfig, ProviderKind};
use crate::error::{Error, Result};
use crate::graph::Triplet;

/// Which text field an extraction request came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceTag {
    Input,
    Context,
}

/// One extraction call: a document plus its model settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionRequest {
    pub text: String,
    pub source_tag: SourceTag,
    pub model_id: String,
    pub max_triplets: usize,
}

impl ExtractionRequest {
    pub fn new(
        text: impl Into<String>,
        source_tag: SourceTag,
        model_id: impl Into<String>,
        max_triplets: usize,
        max_text_chars: usize,
    ) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::InputValidation("extraction text is empty".to_string()));
        }
        if text.chars().count() > max_text_chars {
            return Err(Error::InputValidation(format!(
                "extraction text has {} characters, exceeding the {max_text_chars} limit",
                text.chars().count()
            )));
        }
        if max_triplets == 0 {
            return Err(Error::InputValidation("max_triplets must be positive".to_string()));
        }
        Ok(ExtractionRequest {
            text,
            source_tag,
            model_id: model_id.into(),
            max_triplets,
        })
    }
}

/// Extracts atomic (head, relation, tail) facts from free text.
pub trait TripletExtractor: Send + Sync {
    fn extract(&self, req: &ExtractionRequest) -> Result<Vec<Triplet>>;
}

/// Embeds labels into vectors; one call may batch many labels.
pub trait LabelEmbedder: Send + Sync {
    fn embed(&self, labels: &[String]) -> Result<Vec<Vec<f64>>>;
    fn model_id(&self) -> &str;
}

/// Produces a full cross-group similarity matrix for entity labels.
pub trait SimilarityProvider: Send + Sync {
    fn similarity_matrix(
        &self,
        input_labels: &[String],
        context_labels: &[String],
    ) -> Result<SimilarityMatrix>;
}

/// Pairwise similarity values over (input label, context label) pairs.
///
/// Values lie in [-1, 1]; identical labels must score 1.0 (within 1e-6)
/// under any conforming provider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn new(row_labels: Vec<String>, col_labels: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != row_labels.len() || values.iter().any(|r| r.len() != col_labels.len()) {
            return Err(Error::ProviderContract(format!(
                "similarity matrix dimensions do not match labels: {}x{} labels",
                row_labels.len(),
                col_labels.len()
            )));
        }
        for (i, row) in values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !(-1.0..=1.0).contains(&v) || v.is_nan() {
                    return Err(Error::ProviderContract(format!(
                        "similarity value {v} for ('{}', '{}') is outside [-1, 1]",
                        row_labels[i], col_labels[j]
                    )));
                }
                if row_labels[i] == col_labels[j] && (v - 1.0).abs() > 1e-6 {
                    return Err(Error::ProviderContract(format!(
                        "identical labels '{}' scored {v}, expected 1.0",
                        row_labels[i]
                    )));
                }
            }
        }
        Ok(SimilarityMatrix {
            row_labels,
            col_labels,
            values,
        })
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// Similarity for a (row label, column label) pair, if covered.
    pub fn get(&self, row: &str, col: &str) -> Option<f64> {
        let i = self.row_labels.iter().position(|l| l == row)?;
        let j = self.col_labels.iter().position(|l| l == col)?;
        Some(self.values[i][j])
    }
}

/// Cosine similarity of two vectors: dot(a,b) / (|a|*|b|).
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ProviderContract(format!(
            "embedding dimensions differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ProviderContract("zero-norm embedding".to_string()));
    }
    Ok(dot / (na * nb))
}

/// Similarity provider backed by a label embedder: embeds each distinct
/// label once (batched, cache-aware) and computes cosine locally.
pub struct EmbeddingSimilarity<E> {
    embedder: E,
    cache: Option<Arc<DiskCache>>,
    bypass_reads: bool,
}

impl<E: LabelEmbedder> EmbeddingSimilarity<E> {
    pub fn new(embedder: E) -> Self {
        EmbeddingSimilarity {
            embedder,
            cache: None,
            bypass_reads: false,
        }
    }

    pub fn with_cache(mut self, cache: Arc<DiskCache>, bypass_reads: bool) -> Self {
        self.cache = Some(cache);
        self.bypass_reads = bypass_reads;
        self
    }

    /// One embedding per distinct label; cached per (model, label).
    fn embeddings_for(&self, labels: &[String]) -> Result<Vec<Vec<f64>>> {
        let model = self.embedder.model_id().to_string();
        let keys: Vec<Option<CacheKey>> = labels
            .iter()
            .map(|l| {
                self.cache
                    .as_ref()
                    .map(|_| CacheKey::new("embed", &model, l.as_bytes()))
            })
            .collect();

        let mut out: Vec<Option<Vec<f64>>> = vec![None; labels.len()];
        if let (Some(cache), false) = (&self.cache, self.bypass_reads) {
            for (i, key) in keys.iter().enumerate() {
                if let Some(v) = cache.get::<Vec<f64>>(key.as_ref().unwrap()) {
                    out[i] = Some(v);
                }
            }
        }

        let missing: Vec<usize> = (0..labels.len()).filter(|&i| out[i].is_none()).collect();
        if !missing.is_empty() {
            let batch: Vec<String> = missing.iter().map(|&i| labels[i].clone()).collect();
            let embedded = self.embedder.embed(&batch)?;
            if embedded.len() != batch.len() {
                return Err(Error::ProviderContract(format!(
                    "embedder returned {} vectors for {} labels",
                    embedded.len(),
                    batch.len()
                )));
            }
            for (&i, vector) in missing.iter().zip(embedded) {
                let norm: f64 = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(Error::ProviderContract(format!(
                        "zero-norm embedding for label '{}'",
                        labels[i]
                    )));
                }
                if let Some(cache) = &self.cache {
                    cache.put(keys[i].as_ref().unwrap(), &vector)?;
                }
                out[i] = Some(vector);
            }
        }
        Ok(out.into_iter().map(|v| v.unwrap()).collect())
    }
}

impl<E: LabelEmbedder> SimilarityProvider for EmbeddingSimilarity<E> {
    fn similarity_matrix(
        &self,
        input_labels: &[String],
        context_labels: &[String],
    ) -> Result<SimilarityMatrix> {
        if input_labels.is_empty() || context_labels.is_empty() {
            return Err(Error::ProviderContract(
                "similarity_matrix called with an empty label list".to_string(),
            ));
        }
        // Deduplicate across both sides so identical labels share a vector.
        let mut distinct: Vec<String> = Vec::new();
        for l in input_labels.iter().chain(context_labels) {
            if !distinct.contains(l) {
                distinct.push(l.clone());
            }
        }
        let vectors = self.embeddings_for(&distinct)?;
        let vec_of = |label: &String| -> &Vec<f64> {
            let idx = distinct.iter().position(|d| d == label).unwrap();
            &vectors[idx]
        };

        let mut values = Vec::with_capacity(input_labels.len());
        for row_label in input_labels {
            let mut row = Vec::with_capacity(context_labels.len());
            for col_label in context_labels {
                if row_label == col_label {
                    row.push(1.0);
                } else {
                    let v = cosine_similarity(vec_of(row_label), vec_of(col_label)).map_err(|e| {
                        Error::ProviderContract(format!("('{row_label}', '{col_label}'): {e}"))
                    })?;
                    row.push(v);
                }
            }
            values.push(row);
        }
        SimilarityMatrix::new(input_labels.to_vec(), context_labels.to_vec(), values)
    }
}

/// Extractor wrapper that persists results to the disk cache, keyed on the
/// request content digest.
pub struct CachingExtractor {
    inner: Box<dyn TripletExtractor>,
    kind: &'static str,
    cache: Arc<DiskCache>,
    bypass_reads: bool,
}

impl CachingExtractor {
    pub fn new(
        inner: Box<dyn TripletExtractor>,
        kind: &'static str,
        cache: Arc<DiskCache>,
        bypass_reads: bool,
    ) -> Self {
        CachingExtractor {
            inner,
            kind,
            cache,
            bypass_reads,
        }
    }
}

impl TripletExtractor for CachingExtractor {
    fn extract(&self, req: &ExtractionRequest) -> Result<Vec<Triplet>> {
        let payload = format!("{}\u{0}{}", req.max_triplets, req.text);
        let key = CacheKey::new(self.kind, &req.model_id, payload.as_bytes());
        if !self.bypass_reads {
            if let Some(hit) = self.cache.get::<Vec<Triplet>>(&key) {
                return Ok(hit);
            }
        }
        let fresh = self.inner.extract(req)?;
        self.cache.put(&key, &fresh)?;
        Ok(fresh)
    }
}

/// The assembled provider stack used by the harness and CLI.
pub struct ProviderSet {
    extractor: Box<dyn TripletExtractor>,
    similarity: Box<dyn SimilarityProvider>,
    extract_model: String,
    max_triplets: usize,
    max_text_chars: usize,
}

impl ProviderSet {
    /// Build the mock or live stack described by the config. Live providers
    /// read KGEVAL_API_KEY (required) and optionally KGEVAL_EMBED_URL from
    /// the environment.
    pub fn from_config(cfg: &EvalConfig) -> Result<Self> {
        let cache = Arc::new(DiskCache::new(&cfg.cache_dir)?);
        let (extractor, similarity): (Box<dyn TripletExtractor>, Box<dyn SimilarityProvider>) =
            match cfg.providers {
                ProviderKind::Mock => {
                    let extractor: Box<dyn TripletExtractor> = Box::new(CachingExtractor::new(
                        Box::new(MockExtractor::new()),
                        "extract-mock",
                        Arc::clone(&cache),
                        cfg.no_cache,
                    ));
                    let embedder = HashEmbedder::new(&cfg.embed_model);
                    let similarity: Box<dyn SimilarityProvider> = Box::new(
                        EmbeddingSimilarity::new(embedder).with_cache(Arc::clone(&cache), cfg.no_cache),
                    );
                    (extractor, similarity)
                }
                ProviderKind::Live => {
                    let api_key = std::env::var("KGEVAL_API_KEY").map_err(|_| {
                        Error::Config(
                            "live providers need the KGEVAL_API_KEY environment variable".to_string(),
                        )
                    })?;
                    let embed_url =
                        std::env::var("KGEVAL_EMBED_URL").unwrap_or_else(|_| cfg.embed_url.clone());
                    let limiter = Arc::new(RateLimiter::new(cfg.rate_limit_rps));
                    let extractor: Box<dyn TripletExtractor> = Box::new(CachingExtractor::new(
                        Box::new(HttpExtractor::new(
                            &cfg.api_base,
                            &api_key,
                            Arc::clone(&limiter),
                        )?),
                        "extract-http",
                        Arc::clone(&cache),
                        cfg.no_cache,
                    ));
                    let embedder =
                        HttpEmbedder::new(&embed_url, &api_key, &cfg.embed_model, limiter)?;
                    let similarity: Box<dyn SimilarityProvider> = Box::new(
                        EmbeddingSimilarity::new(embedder).with_cache(Arc::clone(&cache), cfg.no_cache),
                    );
                    (extractor, similarity)
                }
            };
        Ok(ProviderSet {
            extractor,
            similarity,
            extract_model: cfg.extract_model.clone(),
            max_triplets: cfg.max_triplets,
            max_text_chars: cfg.max_text_chars,
        })
    }

    /// Extract triplets from one text field. Empty text short-circuits to
    /// an empty list without touching the provider.
    pub fn extract(&self, text: &str, tag: SourceTag) -> Result<Vec<Triplet>> {
        if text.trim().is_empty() {
            return Ok(Vec::new());
        }
        let req = ExtractionRequest::new(
            text,
            tag,
            self.extract_model.clone(),
            self.max_triplets,
            self.max_text_chars,
        )?;
        self.extractor.extract(&req)
    }

    pub fn similarity(&self) -> &dyn SimilarityProvider {
        self.similarity.as_ref()
    }
}
