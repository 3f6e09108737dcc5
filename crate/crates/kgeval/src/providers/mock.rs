//! Deterministic offline providers.
//!
//! `MockExtractor` parses a rigid micro-format instead of calling an LLM;
//! `HashEmbedder` derives a stable pseudo-random unit vector from each
//! label, so identical labels score 1.0 and unrelated labels land near 0.
//! Together they make the whole pipeline bit-reproducible offline.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Triplet;
use crate::providers::{
    ExtractionRequest, LabelEmbedder, SimilarityMatrix, SimilarityProvider, TripletExtractor,
};

/// Parses the mock micro-format: triplets written as `head|relation|tail`,
/// separated by `;;` or line breaks. Example: `A|r|B;; C|r2|D`.
#[derive(Debug, Default, Clone)]
pub struct MockExtractor;

impl MockExtractor {
    pub fn new() -> Self {
        MockExtractor
    }
}

impl TripletExtractor for MockExtractor {
    fn extract(&self, req: &ExtractionRequest) -> Result<Vec<Triplet>> {
        let mut out = Vec::new();
        let chunks = req
            .text
            .split(";;")
            .flat_map(|part| part.split(['\n', '\r']))
            .map(str::trim)
            .filter(|c| !c.is_empty());
        for chunk in chunks {
            let fields: Vec<&str> = chunk.split('|').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::ExtractionFormat {
                    message: format!(
                        "mock chunk '{chunk}' has {} field(s), expected head|relation|tail",
                        fields.len()
                    ),
                    raw: req.text.clone(),
                });
            }
            let triplet = Triplet::new(fields[0], fields[1], fields[2]).map_err(|e| {
                Error::ExtractionFormat {
                    message: format!("mock chunk '{chunk}': {e}"),
                    raw: req.text.clone(),
                }
            })?;
            out.push(triplet);
            if out.len() == req.max_triplets {
                break;
            }
        }
        Ok(out)
    }
}

/// Embedding dimension for the hash embedder. High enough that two
/// independent label vectors essentially never reach cosine 0.7.
const HASH_EMBED_DIM: usize = 128;

/// Deterministic label embedder: seeds a ChaCha stream from
/// sha256(model, label) and samples a normalized Gaussian vector.
#[derive(Debug, Clone)]
pub struct HashEmbedder {
    model_id: String,
}

impl HashEmbedder {
    pub fn new(model_id: impl Into<String>) -> Self {
        HashEmbedder {
            model_id: model_id.into(),
        }
    }
}

impl LabelEmbedder for HashEmbedder {
    fn embed(&self, labels: &[String]) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(labels.len());
        for label in labels {
            let mut hasher = Sha256::new();
            hasher.update(self.model_id.as_bytes());
            hasher.update([0u8]);
            hasher.update(label.as_bytes());
            let digest = hasher.finalize();
            let seed = u64::from_le_bytes(digest[..8].try_into().unwrap());

            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<f64> = (0..HASH_EMBED_DIM)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in &mut v {
                *x /= norm;
            }
            out.push(v);
        }
        Ok(out)
    }

    fn model_id(&self) -> &str {
        &self.model_id
    }
}

/// Fixture similarity provider backed by an explicit pair table.
///
/// Identical labels always score 1.0; other pairs fall back to the table
/// (either orientation) or to the default value.
#[derive(Debug, Clone)]
pub struct TableSimilarityProvider {
    entries: Vec<(String, String, f64)>,
    default: f64,
}

impl TableSimilarityProvider {
    pub fn new(entries: Vec<((&str, &str), f64)>, default: f64) -> Self {
        TableSimilarityProvider {
            entries: entries
                .into_iter()
                .map(|((a, b), v)| (a.to_string(), b.to_string(), v))
                .collect(),
            default,
        }
    }

    pub fn from_owned(entries: Vec<(String, String, f64)>, default: f64) -> Self {
        TableSimilarityProvider { entries, default }
    }

    fn lookup(&self, a: &str, b: &str) -> f64 {
        if a == b {
            return 1.0;
        }
        self.entries
            .iter()
            .find(|(x, y, _)| (x == a && y == b) || (x == b && y == a))
            .map(|(_, _, v)| *v)
            .unwrap_or(self.default)
    }
}

impl SimilarityProvider for TableSimilarityProvider {
    fn similarity_matrix(
        &self,
        input_labels: &[String],
        context_labels: &[String],
    ) -> Result<SimilarityMatrix> {
        let values = input_labels
            .iter()
            .map(|r| context_labels.iter().map(|c| self.lookup(r, c)).collect())
            .collect();
        SimilarityMatrix::new(input_labels.to_vec(), context_labels.to_vec(), values)
    }
}
