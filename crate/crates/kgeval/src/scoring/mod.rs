//! Scoring: multi-hop semantic matching and community-based overlap over
//! a built entity graph.

mod community;
mod dijkstra;
mod louvain;
mod multihop;

pub use community::{community_score_alg3, community_score_eq2};
pub use dijkstra::{shortest_costs, CostMap};
pub use louvain::{louvain_partition, modularity_of, Partition};
pub use multihop::{multi_hop_score, MultiHop};

use serde::{Deserialize, Serialize};

use crate::config::EvalConfig;
use crate::error::Result;
use crate::graph::{build_entity_relation_graph, EntityGraph, GraphStats, Triplet};
use crate::providers::SimilarityProvider;

/// How edges may be walked during path search. Edges are stored directed
/// (head -> relation -> tail, SIMILAR input -> context) but are walked in
/// both directions by default; `Directed` keeps the stored orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Traversal {
    Bidirectional,
    Directed,
}

impl Traversal {
    pub fn from_directed_flag(directed: bool) -> Self {
        if directed {
            Traversal::Directed
        } else {
            Traversal::Bidirectional
        }
    }
}

/// All per-record scores for one metric pairing. `community` follows the
/// per-community variant; `community_eq2` is the per-input-node variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScorePair {
    pub multi_hop: f64,
    #[serde(rename = "community")]
    pub community_alg3: f64,
    pub community_eq2: f64,
    pub counted_nodes: usize,
    pub total_input_nodes: usize,
}

/// Scores plus the graph shape they were computed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    #[serde(flatten)]
    pub scores: ScorePair,
    pub graph: GraphStats,
}

/// Build the graph for (input source, context source) and compute all
/// three scores. Pure given the provider outputs; the Louvain seed comes
/// from the config, so identical inputs reproduce identical scores.
pub fn score_record_pairwise(
    input_source: &[Triplet],
    context_source: &[Triplet],
    similarity: &dyn SimilarityProvider,
    cfg: &EvalConfig,
) -> Result<ScoredPair> {
    let graph = build_entity_relation_graph(
        input_source,
        context_source,
        similarity,
        &cfg.graph_params(),
    )?;
    score_graph(&graph, cfg)
}

/// Score an already-built graph.
pub fn score_graph(graph: &EntityGraph, cfg: &EvalConfig) -> Result<ScoredPair> {
    let traversal = Traversal::from_directed_flag(cfg.directed_traversal);
    let mh = multi_hop_score(graph, cfg.delta, traversal)?;
    let partition = louvain_partition(graph, cfg.seed, cfg.resolution)?;
    let alg3 = community_score_alg3(graph, &partition)?;
    let eq2 = community_score_eq2(graph, &partition)?;
    Ok(ScoredPair {
        scores: ScorePair {
            multi_hop: mh.score,
            community_alg3: alg3,
            community_eq2: eq2,
            counted_nodes: mh.counted_nodes,
            total_input_nodes: mh.total_input_nodes,
        },
        graph: graph.stats(),
    })
}
