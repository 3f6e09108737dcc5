//! Multi-hop semantic matching: the fraction of input entity nodes that
//! can reach at least one context entity node within the cost budget.

use crate::error::{Error, Result};
use crate::graph::{EntityGraph, Group};
use crate::scoring::dijkstra::{adjacency, dijkstra_from};
use crate::scoring::Traversal;

/// Outcome of one multi-hop run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiHop {
    pub score: f64,
    pub counted_nodes: usize,
    pub total_input_nodes: usize,
}

/// Count input entity nodes with some context entity node at path cost
/// `<= delta`; relation nodes ride along paths but are never counted.
/// Returns 0.0 when either entity set is empty.
pub fn multi_hop_score(g: &EntityGraph, delta: f64, mode: Traversal) -> Result<MultiHop> {
    if delta < 0.0 || delta.is_nan() {
        return Err(Error::Config(format!("delta must be >= 0, got {delta}")));
    }

    let input_nodes: Vec<usize> = g
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, n)| n.is_entity() && n.group == Group::Input)
        .map(|(i, _)| i)
        .collect();
    let context_nodes: Vec<usize> = g
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, n)| n.is_entity() && n.group == Group::Context)
        .map(|(i, _)| i)
        .collect();

    if input_nodes.is_empty() || context_nodes.is_empty() {
        return Ok(MultiHop {
            score: 0.0,
            counted_nodes: 0,
            total_input_nodes: input_nodes.len(),
        });
    }

    let adj = adjacency(g, mode)?;
    let mut counted = 0;
    for &source in &input_nodes {
        let dist = dijkstra_from(&adj, source);
        let reachable = context_nodes
            .iter()
            .any(|&ctx| dist[ctx].is_some_and(|d| d <= delta));
        if reachable {
            counted += 1;
        }
    }

    Ok(MultiHop {
        score: counted as f64 / input_nodes.len() as f64,
        counted_nodes: counted,
        total_input_nodes: input_nodes.len(),
    })
}
