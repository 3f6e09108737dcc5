//! Brute-force reference implementations for checking the production
//! scorers, plus the golden-case fixture schema.
//!
//! These deliberately share no traversal logic with the scoring module:
//! reachability enumerates every simple path, and the partition search
//! walks every set partition. Size caps keep them tractable; inputs above
//! a cap are refused rather than silently truncated.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EntityGraph, Group, NodeId};

/// Node cap for exhaustive path enumeration.
pub const MAX_REACHABILITY_NODES: usize = 12;
/// Node cap for exhaustive partition search.
pub const MAX_PARTITION_NODES: usize = 10;

/// Reachability outcome mirroring the shape of the production scorer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReachability {
    pub score: f64,
    pub counted_nodes: usize,
    pub total_input_nodes: usize,
}

/// Exact multi-hop score by enumerating all simple paths (edges walked in
/// both directions) and taking the minimum cost from each input entity to
/// any context entity. Refuses graphs above [`MAX_REACHABILITY_NODES`].
pub fn brute_force_reachability(g: &EntityGraph, delta: f64) -> Result<OracleReachability> {
    if g.node_count() > MAX_REACHABILITY_NODES {
        return Err(Error::OracleRefusal(format!(
            "reachability oracle caps at {MAX_REACHABILITY_NODES} nodes, got {}",
            g.node_count()
        )));
    }
    if delta < 0.0 || delta.is_nan() {
        return Err(Error::Config(format!("delta must be >= 0, got {delta}")));
    }

    let n = g.node_count();
    let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in g.edges() {
        let s = g.index_of(&e.source).expect("graph is self-consistent");
        let t = g.index_of(&e.target).expect("graph is self-consistent");
        neighbors[s].push((t, e.cost));
        neighbors[t].push((s, e.cost));
    }

    let inputs: Vec<usize> = g
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, node)| node.is_entity() && node.group == Group::Input)
        .map(|(i, _)| i)
        .collect();
    let is_context_entity: Vec<bool> = g
        .nodes()
        .iter()
        .map(|node| node.is_entity() && node.group == Group::Context)
        .collect();

    if inputs.is_empty() || !is_context_entity.iter().any(|&b| b) {
        return Ok(OracleReachability {
            score: 0.0,
            counted_nodes: 0,
            total_input_nodes: inputs.len(),
        });
    }

    // Depth-first walk over simple paths. Costs are nonnegative, so a
    // prefix that already exceeds the budget cannot reach a target within
    // it; pruning those prefixes (and stopping once some path has made
    // the decision) keeps the enumeration exact for `best <= delta`.
    fn walk(
        node: usize,
        cost_so_far: f64,
        delta: f64,
        visited: &mut Vec<bool>,
        neighbors: &[Vec<(usize, f64)>],
        is_target: &[bool],
        best: &mut f64,
    ) {
        if is_target[node] && cost_so_far < *best {
            *best = cost_so_far;
        }
        if *best <= delta {
            return;
        }
        for &(next, cost) in &neighbors[node] {
            let extended = cost_so_far + cost;
            if !visited[next] && extended <= delta {
                visited[next] = true;
                walk(next, extended, delta, visited, neighbors, is_target, best);
                visited[next] = false;
                if *best <= delta {
                    return;
                }
            }
        }
    }

    let mut counted = 0;
    for &start in &inputs {
        let mut visited = vec![false; n];
        visited[start] = true;
        let mut best = f64::INFINITY;
        walk(start, 0.0, delta, &mut visited, &neighbors, &is_context_entity, &mut best);
        if best <= delta {
            counted += 1;
        }
    }

    Ok(OracleReachability {
        score: counted as f64 / inputs.len() as f64,
        counted_nodes: counted,
        total_input_nodes: inputs.len(),
    })
}

/// Globally optimal partition by exhaustive search over set partitions
/// (restricted growth strings). Modularity is computed pairwise from the
/// edge list, a separate route from the per-community sums used by the
/// production code. Refuses graphs above [`MAX_PARTITION_NODES`].
pub fn brute_force_best_partition(
    g: &EntityGraph,
    resolution: f64,
) -> Result<(BTreeMap<NodeId, usize>, f64)> {
    if g.node_count() > MAX_PARTITION_NODES {
        return Err(Error::OracleRefusal(format!(
            "partition oracle caps at {MAX_PARTITION_NODES} nodes, got {}",
            g.node_count()
        )));
    }
    let n = g.node_count();
    if n == 0 {
        return Ok((BTreeMap::new(), 0.0));
    }

    // Pairwise weights, parallel edges summed, both orientations folded.
    let mut pair_weight: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in g.edges() {
        let s = g.index_of(&e.source).expect("graph is self-consistent");
        let t = g.index_of(&e.target).expect("graph is self-consistent");
        let key = (s.min(t), s.max(t));
        *pair_weight.entry(key).or_insert(0.0) += e.weight;
    }
    let mut degree = vec![0.0; n];
    for (&(u, v), &w) in &pair_weight {
        // Self-loops land here twice by the same rule, matching the
        // convention that they count double toward the degree.
        degree[u] += w;
        degree[v] += w;
    }
    let m2: f64 = degree.iter().sum();

    let pairwise_modularity = |assign: &[usize]| -> f64 {
        if m2 == 0.0 {
            return 0.0;
        }
        let mut q = 0.0;
        for (&(u, v), &w) in &pair_weight {
            if assign[u] == assign[v] {
                q += 2.0 * w / m2;
            }
        }
        for u in 0..n {
            for v in 0..n {
                if assign[u] == assign[v] {
                    q -= resolution * degree[u] * degree[v] / (m2 * m2);
                }
            }
        }
        q
    };

    let mut assign = vec![0usize; n];
    let mut best_assign = assign.clone();
    let mut best_q = pairwise_modularity(&assign);

    // Enumerate restricted growth strings: assign[0] = 0 and each later
    // node may join any used community or open the next one.
    fn enumerate(
        idx: usize,
        max_used: usize,
        assign: &mut Vec<usize>,
        eval: &mut dyn FnMut(&[usize]),
    ) {
        if idx == assign.len() {
            eval(assign);
            return;
        }
        for c in 0..=max_used + 1 {
            assign[idx] = c;
            enumerate(idx + 1, max_used.max(c), assign, eval);
        }
    }

    if n > 1 {
        let mut eval = |candidate: &[usize]| {
            let q = pairwise_modularity(candidate);
            if q > best_q {
                best_q = q;
                best_assign = candidate.to_vec();
            }
        };
        let mut work = vec![0usize; n];
        // First node pinned to community 0.
        enumerate(1, 0, &mut work, &mut eval);
        let _ = work;
        assign = best_assign.clone();
    }

    let mut out = BTreeMap::new();
    for (idx, node) in g.nodes().iter().enumerate() {
        out.insert(node.id.clone(), assign[idx]);
    }
    Ok((out, best_q))
}

/// Provenance of a golden expectation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Trivial,
    DerivedWithOracle,
}

/// Expected values a golden case pins down.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct GoldenExpectation {
    pub multi_hop: f64,
    pub community: f64,
    pub community_eq2: f64,
    pub counted_nodes: usize,
    pub total_input_nodes: usize,
    pub nodes: usize,
    pub edges: usize,
    pub similar_edges: usize,
}

/// One hand-built micro-case: triplets, a mock similarity table, the
/// thresholds it runs under, and the frozen expected outputs.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct GoldenCase {
    pub name: String,
    pub input_triplets: Vec<[String; 3]>,
    pub context_triplets: Vec<[String; 3]>,
    /// (input label, context label, similarity) entries.
    pub similarity_table: Vec<(String, String, f64)>,
    /// Fallback similarity for pairs not in the table.
    pub similarity_default: f64,
    pub tau: f64,
    pub delta: f64,
    pub seed: u64,
    pub resolution: f64,
    pub expected: GoldenExpectation,
    pub provenance: Provenance,
}

impl GoldenCase {
    pub fn load_all(json: &str) -> Result<Vec<GoldenCase>> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn input_triplets(&self) -> Result<Vec<crate::graph::Triplet>> {
        self.input_triplets
            .iter()
            .map(|[h, r, t]| crate::graph::Triplet::new(h.clone(), r.clone(), t.clone()))
            .collect()
    }

    pub fn context_triplets(&self) -> Result<Vec<crate::graph::Triplet>> {
        self.context_triplets
            .iter()
            .map(|[h, r, t]| crate::graph::Triplet::new(h.clone(), r.clone(), t.clone()))
            .collect()
    }

    pub fn similarity_provider(&self) -> crate::providers::TableSimilarityProvider {
        crate::providers::TableSimilarityProvider::from_owned(
            self.similarity_table.clone(),
            self.similarity_default,
        )
    }
}
