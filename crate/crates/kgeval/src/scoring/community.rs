//! Community-based semantic overlap scores, in both reported variants:
//! per-community (fraction of communities mixing input and context
//! entities) and per-node (fraction of input entity nodes sharing a
//! community with a context entity node).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{EntityGraph, Group};
use crate::scoring::louvain::Partition;

fn check_cover(g: &EntityGraph, p: &Partition) -> Result<()> {
    if !p.covers(g) {
        return Err(Error::Invariant(
            "partition does not match the graph it is scored against".to_string(),
        ));
    }
    Ok(())
}

/// Entity membership of each community: (has input entity, has context
/// entity), indexed by community id. Relation nodes are ignored.
fn community_mix(g: &EntityGraph, p: &Partition) -> BTreeMap<usize, (bool, bool)> {
    let mut mix: BTreeMap<usize, (bool, bool)> = BTreeMap::new();
    for (id, &comm) in p.assignment() {
        let entry = mix.entry(comm).or_insert((false, false));
        let node = g.node(id).expect("cover checked");
        if node.is_entity() {
            match node.group {
                Group::Input => entry.0 = true,
                Group::Context => entry.1 = true,
            }
        }
    }
    mix
}

/// Fraction of communities containing at least one input entity node and
/// at least one context entity node; 0 when there are no communities.
pub fn community_score_alg3(g: &EntityGraph, p: &Partition) -> Result<f64> {
    check_cover(g, p)?;
    let mix = community_mix(g, p);
    let total = mix.len();
    if total == 0 {
        return Ok(0.0);
    }
    let mixed = mix.values().filter(|(i, c)| *i && *c).count();
    Ok(mixed as f64 / total as f64)
}

/// Fraction of input entity nodes whose community also holds a context
/// entity node; 0 when there are no input entity nodes.
pub fn community_score_eq2(g: &EntityGraph, p: &Partition) -> Result<f64> {
    check_cover(g, p)?;
    let mix = community_mix(g, p);
    let input_entities: Vec<usize> = g
        .entity_nodes(Group::Input)
        .map(|n| p.community_of(&n.id).expect("cover checked"))
        .collect();
    if input_entities.is_empty() {
        return Ok(0.0);
    }
    let co_located = input_entities
        .iter()
        .filter(|comm| mix.get(comm).is_some_and(|(_, ctx)| *ctx))
        .count();
    Ok(co_located as f64 / input_entities.len() as f64)
}
