//! Louvain community detection by greedy modularity optimization.
//!
//! The graph is viewed as undirected and weighted (edge weight attribute;
//! parallel edges between a node pair sum their weights). Node visiting
//! order comes from a seeded shuffle so a fixed seed reproduces the exact
//! partition. Local passes repeat until no node moves; levels repeat
//! until the modularity gain drops below 1e-7.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{EntityGraph, NodeId};

const LEVEL_GAIN_EPSILON: f64 = 1e-7;

/// Minimum gain for a node move. Genuine gains on weighted graphs sit
/// many orders of magnitude above this; rounding noise on symmetric
/// configurations sits below it and would otherwise ping-pong forever.
const MOVE_GAIN_EPSILON: f64 = 1e-12;

/// Backstop on local passes within one level.
const MAX_LEVEL_PASSES: usize = 128;

/// A community assignment with its recorded modularity and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    assignment: BTreeMap<NodeId, usize>,
    modularity: f64,
    seed: u64,
}

impl Partition {
    /// Wrap an explicit assignment: community ids are relabeled densely
    /// from 0 (first appearance in node insertion order) and modularity
    /// is computed from the graph.
    pub fn from_assignment(
        g: &EntityGraph,
        raw: &BTreeMap<NodeId, usize>,
        seed: u64,
        resolution: f64,
    ) -> Result<Self> {
        for node in g.nodes() {
            if !raw.contains_key(&node.id) {
                return Err(Error::Invariant(format!(
                    "partition does not cover node '{}'",
                    node.id
                )));
            }
        }
        if raw.len() != g.node_count() {
            return Err(Error::Invariant(format!(
                "partition assigns {} nodes but the graph has {}",
                raw.len(),
                g.node_count()
            )));
        }

        let mut dense: BTreeMap<usize, usize> = BTreeMap::new();
        let mut assignment = BTreeMap::new();
        for node in g.nodes() {
            let raw_id = raw[&node.id];
            let next = dense.len();
            let id = *dense.entry(raw_id).or_insert(next);
            assignment.insert(node.id.clone(), id);
        }
        let modularity = modularity_of(g, &assignment, resolution)?;
        Ok(Partition {
            assignment,
            modularity,
            seed,
        })
    }

    pub fn assignment(&self) -> &BTreeMap<NodeId, usize> {
        &self.assignment
    }

    pub fn modularity(&self) -> f64 {
        self.modularity
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn community_of(&self, id: &NodeId) -> Option<usize> {
        self.assignment.get(id).copied()
    }

    pub fn community_count(&self) -> usize {
        self.assignment.values().copied().max().map_or(0, |m| m + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Every node of `g` assigned exactly once?
    pub fn covers(&self, g: &EntityGraph) -> bool {
        self.assignment.len() == g.node_count()
            && g.nodes().iter().all(|n| self.assignment.contains_key(&n.id))
    }
}

/// Undirected weighted adjacency over node indices; parallel edges sum.
pub(crate) fn undirected_adjacency(g: &EntityGraph) -> Result<Vec<BTreeMap<usize, f64>>> {
    let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); g.node_count()];
    for edge in g.edges() {
        let s = g
            .index_of(&edge.source)
            .ok_or_else(|| Error::Invariant(format!("dangling edge source {}", edge.source)))?;
        let t = g
            .index_of(&edge.target)
            .ok_or_else(|| Error::Invariant(format!("dangling edge target {}", edge.target)))?;
        if edge.weight <= 0.0 || edge.weight.is_nan() {
            return Err(Error::Invariant(format!(
                "modularity needs positive edge weights, got {} on {} -> {}",
                edge.weight, edge.source, edge.target
            )));
        }
        *adj[s].entry(t).or_insert(0.0) += edge.weight;
        *adj[t].entry(s).or_insert(0.0) += edge.weight;
    }
    Ok(adj)
}

/// Modularity of an assignment over the graph's undirected weighted view.
/// Defined as 0 for graphs with no edges.
pub fn modularity_of(
    g: &EntityGraph,
    assignment: &BTreeMap<NodeId, usize>,
    resolution: f64,
) -> Result<f64> {
    if assignment.len() != g.node_count() {
        return Err(Error::Invariant(
            "assignment does not cover the graph".to_string(),
        ));
    }
    let comm: Vec<usize> = g
        .nodes()
        .iter()
        .map(|n| {
            assignment
                .get(&n.id)
                .copied()
                .ok_or_else(|| Error::Invariant(format!("partition does not cover node '{}'", n.id)))
        })
        .collect::<Result<_>>()?;
    let adj = undirected_adjacency(g)?;
    Ok(modularity_from_adjacency(&adj, &comm, resolution))
}

/// Q = sum over communities of (sigma_in / m2) - r * (sigma_tot / m2)^2,
/// where sigma_in counts ordered intra-community pairs and m2 is the
/// total degree. Self-loop entries (present in aggregated graphs) carry
/// their doubled weight already.
fn modularity_from_adjacency(adj: &[BTreeMap<usize, f64>], comm: &[usize], resolution: f64) -> f64 {
    let m2: f64 = adj.iter().map(|row| row.values().sum::<f64>()).sum();
    if m2 == 0.0 {
        return 0.0;
    }
    let n_comms = comm.iter().copied().max().map_or(0, |m| m + 1);
    let mut sigma_in = vec![0.0; n_comms];
    let mut sigma_tot = vec![0.0; n_comms];
    for (u, row) in adj.iter().enumerate() {
        let cu = comm[u];
        let degree: f64 = row.values().sum();
        sigma_tot[cu] += degree;
        for (&v, &w) in row {
            if comm[v] == cu {
                sigma_in[cu] += w;
            }
        }
    }
    (0..n_comms)
        .map(|c| sigma_in[c] / m2 - resolution * (sigma_tot[c] / m2) * (sigma_tot[c] / m2))
        .sum()
}

struct LevelGraph {
    adj: Vec<BTreeMap<usize, f64>>,
}

impl LevelGraph {
    fn node_count(&self) -> usize {
        self.adj.len()
    }

    fn degrees(&self) -> Vec<f64> {
        self.adj.iter().map(|row| row.values().sum()).collect()
    }

    /// Collapse communities into single nodes, keeping total weight.
    fn aggregate(&self, comm: &[usize]) -> LevelGraph {
        let n_comms = comm.iter().copied().max().map_or(0, |m| m + 1);
        let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n_comms];
        for (u, row) in self.adj.iter().enumerate() {
            let cu = comm[u];
            for (&v, &w) in row {
                *adj[cu].entry(comm[v]).or_insert(0.0) += w;
            }
        }
        LevelGraph { adj }
    }
}

/// One local-move level. Returns true if any node changed community.
/// Candidate communities are visited in ascending id order and a move
/// needs a strictly positive gain, so ties resolve deterministically.
fn one_level(
    graph: &LevelGraph,
    node_to_comm: &mut [usize],
    resolution: f64,
    rng: &mut ChaCha8Rng,
) -> bool {
    let degrees = graph.degrees();
    let m2: f64 = degrees.iter().sum();
    if m2 == 0.0 {
        return false;
    }

    let mut comm_degrees = vec![0.0; graph.node_count()];
    for (node, &c) in node_to_comm.iter().enumerate() {
        comm_degrees[c] += degrees[node];
    }

    let mut order: Vec<usize> = (0..graph.node_count()).collect();
    order.shuffle(rng);

    let mut moved_any = false;
    for _pass in 0..MAX_LEVEL_PASSES {
        let mut moves = 0;
        for &node in &order {
            let current = node_to_comm[node];
            let k = degrees[node];
            comm_degrees[current] -= k;

            // Weights from this node to each neighboring community,
            // self-loops excluded (they move with the node).
            let mut neighbor_weights: BTreeMap<usize, f64> = BTreeMap::new();
            for (&nb, &w) in &graph.adj[node] {
                if nb != node {
                    *neighbor_weights.entry(node_to_comm[nb]).or_insert(0.0) += w;
                }
            }

            let w_current = neighbor_weights.get(&current).copied().unwrap_or(0.0);
            let removal_cost =
                -w_current / m2 + resolution * comm_degrees[current] * k / (m2 * m2);

            let mut best = current;
            let mut best_gain = MOVE_GAIN_EPSILON;
            for (&candidate, &w_cand) in &neighbor_weights {
                if candidate == current {
                    continue;
                }
                let gain = removal_cost + w_cand / m2
                    - resolution * comm_degrees[candidate] * k / (m2 * m2);
                if gain > best_gain {
                    best_gain = gain;
                    best = candidate;
                }
            }

            comm_degrees[best] += k;
            if best != current {
                node_to_comm[node] = best;
                moves += 1;
                moved_any = true;
            }
        }
        if moves == 0 {
            break;
        }
    }
    moved_any
}

fn relabel_dense(comm: &mut [usize]) -> usize {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    for c in comm.iter_mut() {
        let next = map.len();
        *c = *map.entry(*c).or_insert(next);
    }
    map.len()
}

/// Run Louvain on the graph. Deterministic for a fixed seed; an empty
/// graph yields the empty partition with modularity 0.
pub fn louvain_partition(g: &EntityGraph, seed: u64, resolution: f64) -> Result<Partition> {
    if resolution <= 0.0 || resolution.is_nan() {
        return Err(Error::Config(format!("resolution must be > 0, got {resolution}")));
    }
    if g.is_empty() {
        return Ok(Partition {
            assignment: BTreeMap::new(),
            modularity: 0.0,
            seed,
        });
    }

    let base = LevelGraph {
        adj: undirected_adjacency(g)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // mapping[original node] -> node in the current aggregated graph
    let mut mapping: Vec<usize> = (0..base.node_count()).collect();
    let mut level = LevelGraph {
        adj: base.adj.clone(),
    };
    let mut current_q = {
        let singleton: Vec<usize> = (0..base.node_count()).collect();
        modularity_from_adjacency(&base.adj, &singleton, resolution)
    };

    loop {
        let mut node_to_comm: Vec<usize> = (0..level.node_count()).collect();
        let improved = one_level(&level, &mut node_to_comm, resolution, &mut rng);
        if !improved {
            break;
        }
        relabel_dense(&mut node_to_comm);
        for slot in mapping.iter_mut() {
            *slot = node_to_comm[*slot];
        }
        let new_q = modularity_from_adjacency(&base.adj, &mapping, resolution);
        let gained = new_q - current_q;
        current_q = new_q;
        level = level.aggregate(&node_to_comm);
        if gained < LEVEL_GAIN_EPSILON {
            break;
        }
    }

    let mut raw = BTreeMap::new();
    for (idx, node) in g.nodes().iter().enumerate() {
        raw.insert(node.id.clone(), mapping[idx]);
    }
    Partition::from_assignment(g, &raw, seed, resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GraphParams;
    use crate::graph::{build_entity_relation_graph, triplets_to_subgraph, Group, Triplet};
    use crate::providers::TableSimilarityProvider;

    fn t(h: &str, r: &str, t_: &str) -> Triplet {
        Triplet::new(h, r, t_).unwrap()
    }

    fn two_chains() -> EntityGraph {
        let table = TableSimilarityProvider::new(vec![], 0.0);
        build_entity_relation_graph(
            &[t("A", "r", "B")],
            &[t("C", "s", "D")],
            &table,
            &GraphParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn single_chain_collapses_to_one_community() {
        let g = triplets_to_subgraph(&[t("A", "r", "B")], Group::Input, &GraphParams::default())
            .unwrap();
        let p = louvain_partition(&g, 42, 1.0).unwrap();
        assert_eq!(p.community_count(), 1);
        assert!((p.modularity() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn disconnected_chains_never_share_a_community() {
        let g = two_chains();
        let p = louvain_partition(&g, 42, 1.0).unwrap();
        let left = p.community_of(&NodeId::from_raw("A_in")).unwrap();
        let right = p.community_of(&NodeId::from_raw("C_ctx")).unwrap();
        assert_ne!(left, right);
        for id in ["A_in", "r_0_in", "B_in"] {
            assert_eq!(p.community_of(&NodeId::from_raw(id)), Some(left));
        }
        for id in ["C_ctx", "s_0_ctx", "D_ctx"] {
            assert_eq!(p.community_of(&NodeId::from_raw(id)), Some(right));
        }
    }

    #[test]
    fn empty_graph_yields_empty_partition() {
        let g = triplets_to_subgraph(&[], Group::Input, &GraphParams::default()).unwrap();
        let p = louvain_partition(&g, 42, 1.0).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.modularity(), 0.0);
    }

    #[test]
    fn fixed_seed_reproduces_partition() {
        let g = two_chains();
        let p1 = louvain_partition(&g, 7, 1.0).unwrap();
        for _ in 0..5 {
            let p2 = louvain_partition(&g, 7, 1.0).unwrap();
            assert_eq!(p1.assignment(), p2.assignment());
        }
    }

    #[test]
    fn modularity_beats_singleton_baseline() {
        let g = two_chains();
        let p = louvain_partition(&g, 42, 1.0).unwrap();
        let singletons: BTreeMap<NodeId, usize> = g
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), i))
            .collect();
        let q_single = modularity_of(&g, &singletons, 1.0).unwrap();
        assert!(p.modularity() >= q_single);
    }

    #[test]
    fn recorded_modularity_matches_recomputation() {
        let g = two_chains();
        let p = louvain_partition(&g, 42, 1.0).unwrap();
        let again = modularity_of(&g, p.assignment(), 1.0).unwrap();
        assert!((p.modularity() - again).abs() < 1e-9);
    }

    #[test]
    fn community_ids_are_dense_from_zero() {
        let g = two_chains();
        let p = louvain_partition(&g, 42, 1.0).unwrap();
        let mut seen: Vec<usize> = p.assignment().values().copied().collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen, (0..p.community_count()).collect::<Vec<_>>());
    }

    #[test]
    fn partition_from_assignment_rejects_partial_cover() {
        let g = two_chains();
        let partial: BTreeMap<NodeId, usize> =
            [(NodeId::from_raw("A_in"), 0)].into_iter().collect();
        assert!(Partition::from_assignment(&g, &partial, 0, 1.0).is_err());
    }

    #[test]
    fn bad_resolution_is_a_config_error() {
        let g = two_chains();
        assert!(louvain_partition(&g, 42, 0.0).is_err());
        assert!(louvain_partition(&g, 42, -1.0).is_err());
    }
}
