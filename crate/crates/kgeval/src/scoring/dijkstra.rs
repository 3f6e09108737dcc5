//! Single-source shortest path costs over the entity graph.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use crate::error::{Error, Result};
use crate::graph::{EntityGraph, NodeId};
use crate::scoring::Traversal;

/// Accumulated shortest edge costs from one source node. Unreachable
/// nodes are absent from the map; the source itself maps to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMap {
    pub source: NodeId,
    pub distances: BTreeMap<NodeId, f64>,
}

impl CostMap {
    pub fn cost_to(&self, target: &NodeId) -> Option<f64> {
        self.distances.get(target).copied()
    }
}

/// Adjacency view used for path search. Structural and SIMILAR edges are
/// stored directed but traversed in both directions by default; the
/// directed mode follows stored directions only.
pub(crate) fn adjacency(g: &EntityGraph, mode: Traversal) -> Result<Vec<Vec<(usize, f64)>>> {
    let mut adj = vec![Vec::new(); g.node_count()];
    for edge in g.edges() {
        if edge.cost < 0.0 || edge.cost.is_nan() {
            return Err(Error::Invariant(format!(
                "edge {} -> {} has negative cost {}",
                edge.source, edge.target, edge.cost
            )));
        }
        let s = g
            .index_of(&edge.source)
            .ok_or_else(|| Error::Invariant(format!("dangling edge source {}", edge.source)))?;
        let t = g
            .index_of(&edge.target)
            .ok_or_else(|| Error::Invariant(format!("dangling edge target {}", edge.target)))?;
        adj[s].push((t, edge.cost));
        if mode == Traversal::Bidirectional {
            adj[t].push((s, edge.cost));
        }
    }
    Ok(adj)
}

/// Heap entry ordered by smallest cost first.
struct Pending {
    cost: f64,
    node: usize,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cost == other.cost && self.node == other.node
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed so BinaryHeap pops the cheapest entry.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Dijkstra over the traversal view of the graph.
pub fn shortest_costs(g: &EntityGraph, source: &NodeId, mode: Traversal) -> Result<CostMap> {
    let start = g
        .index_of(source)
        .ok_or_else(|| Error::UnknownNode(source.to_string()))?;
    let adj = adjacency(g, mode)?;
    let dist = dijkstra_from(&adj, start);

    let mut distances = BTreeMap::new();
    for (idx, d) in dist.into_iter().enumerate() {
        if let Some(d) = d {
            distances.insert(g.nodes()[idx].id.clone(), d);
        }
    }
    Ok(CostMap {
        source: source.clone(),
        distances,
    })
}

/// Core relaxation loop over a prebuilt adjacency list.
pub(crate) fn dijkstra_from(adj: &[Vec<(usize, f64)>], start: usize) -> Vec<Option<f64>> {
    let mut dist: Vec<Option<f64>> = vec![None; adj.len()];
    let mut settled = vec![false; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[start] = Some(0.0);
    heap.push(Pending {
        cost: 0.0,
        node: start,
    });

    while let Some(Pending { cost, node }) = heap.pop() {
        if settled[node] {
            continue;
        }
        settled[node] = true;
        for &(next, edge_cost) in &adj[node] {
            let candidate = cost + edge_cost;
            if !settled[next] && dist[next].is_none_or(|d| candidate < d) {
                dist[next] = Some(candidate);
                heap.push(Pending {
                    cost: candidate,
                    node: next,
                });
            }
        }
    }
    dist
}
