//! Entity-relation graph model.
//!
//! Two triplet sets (input and context) become two disjoint subgraphs:
//! each triplet `(h, r, t)` contributes a head entity node, a relation
//! node unique to that triplet, a tail entity node, and the two structural
//! edges `h -> r` and `r -> t`. Entity nodes are deduplicated by exact
//! label within a group; relation node ids embed the triplet ordinal so
//! unrelated triplets sharing a relation label never merge. After the
//! merge, SIMILAR edges bridge cross-group entity pairs whose label
//! similarity reaches the threshold, with `weight = similarity` and
//! `cost = 1 - similarity`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::GraphParams;
use crate::error::{Error, Result};
use crate::providers::SimilarityMatrix;

/// An atomic fact: (head, relation, tail).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triplet {
    pub head: String,
    pub relation: String,
    pub tail: String,
}

impl Triplet {
    /// Build a triplet, trimming surrounding whitespace. All three labels
    /// must be non-empty after the trim; casing is preserved.
    pub fn new(
        head: impl Into<String>,
        relation: impl Into<String>,
        tail: impl Into<String>,
    ) -> Result<Self> {
        let t = Triplet {
            head: head.into().trim().to_string(),
            relation: relation.into().trim().to_string(),
            tail: tail.into().trim().to_string(),
        };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<()> {
        for (name, field) in [
            ("head", &self.head),
            ("relation", &self.relation),
            ("tail", &self.tail),
        ] {
            if field.trim().is_empty() {
                return Err(Error::InputValidation(format!("triplet has empty {name} field")));
            }
        }
        Ok(())
    }
}

/// Which source a node (or subgraph) came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Input,
    Context,
}

impl Group {
    /// Node-id suffix for this group.
    pub fn suffix(self) -> &'static str {
        match self {
            Group::Input => "in",
            Group::Context => "ctx",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Input => "input",
            Group::Context => "context",
        })
    }
}

/// Role of a node inside its triplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeType {
    Head,
    Relation,
    Tail,
}

impl NodeType {
    /// Heads and tails are entity nodes; relation nodes are not.
    pub fn is_entity(self) -> bool {
        !matches!(self, NodeType::Relation)
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeType::Head => "head",
            NodeType::Relation => "relation",
            NodeType::Tail => "tail",
        })
    }
}

/// Opaque node identifier: label plus group suffix, with a per-triplet
/// ordinal spliced in for relation nodes (`label_in`, `label_3_ctx`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    fn entity(label: &str, group: Group) -> Self {
        NodeId(format!("{label}_{}", group.suffix()))
    }

    fn relation(label: &str, ordinal: usize, group: Group) -> Self {
        NodeId(format!("{label}_{ordinal}_{}", group.suffix()))
    }

    /// Wrap an already-formed id string (graph lookups, tests).
    pub fn from_raw(raw: impl Into<String>) -> Self {
        NodeId(raw.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A graph node with its metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub original_label: String,
    pub node_type: NodeType,
    pub group: Group,
}

impl Node {
    pub fn is_entity(&self) -> bool {
        self.node_type.is_entity()
    }
}

/// Edge kind: intra-triplet structure or a cross-group semantic bridge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    #[serde(rename = "structural")]
    Structural,
    #[serde(rename = "SIMILAR")]
    Similar,
}

/// A directed edge. Structural edges carry the configured fixed
/// weight/cost; SIMILAR edges carry `weight = sim`, `cost = 1 - sim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub kind: EdgeKind,
    pub weight: f64,
    pub cost: f64,
}

/// Node/edge/SIMILAR-edge counts for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub similar_edges: usize,
}

/// Merged entity-relation multigraph over both groups.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<NodeId, usize>,
    params: GraphParams,
}

impl EntityGraph {
    fn empty(params: GraphParams) -> Self {
        EntityGraph {
            nodes: Vec::new(),
            edges: Vec::new(),
            index: HashMap::new(),
            params,
        }
    }

    /// Insert a node, deduplicating entities by id. Entity nodes with the
    /// same label/group map to one node (the first occurrence wins); an id
    /// clash between an entity node and a relation node is rejected.
    fn upsert_node(&mut self, node: Node) -> Result<usize> {
        if let Some(&idx) = self.index.get(&node.id) {
            let existing = &self.nodes[idx];
            if existing.is_entity() != node.is_entity() || existing.original_label != node.original_label {
                return Err(Error::Invariant(format!(
                    "node id collision: '{}' already taken by {} node '{}'",
                    node.id, existing.node_type, existing.original_label
                )));
            }
            return Ok(idx);
        }
        let idx = self.nodes.len();
        self.index.insert(node.id.clone(), idx);
        self.nodes.push(node);
        Ok(idx)
    }

    fn push_edge(&mut self, edge: Edge) {
        self.edges.push(edge);
    }

    /// Test-only back door for rigging invalid edges.
    #[cfg(test)]
    pub(crate) fn push_edge_unchecked(&mut self, edge: Edge) {
        self.edges.push(edge);
    }

    pub fn params(&self) -> &GraphParams {
        &self.params
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.index.contains_key(id)
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    /// Position of a node in insertion order.
    pub fn index_of(&self, id: &NodeId) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Entity nodes of one group, in insertion order.
    pub fn entity_nodes(&self, group: Group) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.is_entity() && n.group == group)
    }

    /// Distinct entity labels of one group, in first-seen order.
    pub fn entity_labels(&self, group: Group) -> Vec<String> {
        self.entity_nodes(group).map(|n| n.original_label.clone()).collect()
    }

    pub fn structural_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Structural).count()
    }

    pub fn similar_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Similar).count()
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            nodes: self.node_count(),
            edges: self.edge_count(),
            similar_edges: self.similar_edge_count(),
        }
    }
}

/// Build one group's subgraph from its triplets.
///
/// Per triplet `i`: entity nodes for head and tail (deduplicated by label
/// within the group), one relation node carrying ordinal `i`, and two
/// structural edges `head -> relation -> tail` with the configured
/// weight/cost. An empty triplet list yields an empty graph.
pub fn triplets_to_subgraph(
    triplets: &[Triplet],
    group: Group,
    params: &GraphParams,
) -> Result<EntityGraph> {
    let mut g = EntityGraph::empty(*params);
    for (i, t) in triplets.iter().enumerate() {
        t.check()
            .map_err(|e| Error::InputValidation(format!("triplet {i}: {e}")))?;

        let head_id = NodeId::entity(&t.head, group);
        let rel_id = NodeId::relation(&t.relation, i, group);
        let tail_id = NodeId::entity(&t.tail, group);

        g.upsert_node(Node {
            id: head_id.clone(),
            original_label: t.head.clone(),
            node_type: NodeType::Head,
            group,
        })?;
        g.upsert_node(Node {
            id: rel_id.clone(),
            original_label: t.relation.clone(),
            node_type: NodeType::Relation,
            group,
        })?;
        g.upsert_node(Node {
            id: tail_id.clone(),
            original_label: t.tail.clone(),
            node_type: NodeType::Tail,
            group,
        })?;

        g.push_edge(Edge {
            source: head_id,
            target: rel_id.clone(),
            kind: EdgeKind::Structural,
            weight: params.structural_weight,
            cost: params.structural_cost,
        });
        g.push_edge(Edge {
            source: rel_id,
            target: tail_id,
            kind: EdgeKind::Structural,
            weight: params.structural_weight,
            cost: params.structural_cost,
        });
    }
    Ok(g)
}

/// Disjoint union of the input and context subgraphs.
///
/// Group suffixes guarantee no id collision, so node and edge counts add
/// exactly. Rejects arguments whose nodes are not uniformly of the
/// expected group, and mismatched structural constants.
pub fn merge_graphs(g_in: EntityGraph, g_ctx: EntityGraph) -> Result<EntityGraph> {
    for (g, want) in [(&g_in, Group::Input), (&g_ctx, Group::Context)] {
        if let Some(bad) = g.nodes().iter().find(|n| n.group != want) {
            return Err(Error::Invariant(format!(
                "merge expects a pure {want} graph but found node '{}' of group {}",
                bad.id, bad.group
            )));
        }
    }
    if g_in.params.structural_weight != g_ctx.params.structural_weight
        || g_in.params.structural_cost != g_ctx.params.structural_cost
    {
        return Err(Error::Invariant(
            "cannot merge subgraphs built with different structural constants".to_string(),
        ));
    }

    let mut merged = EntityGraph::empty(g_in.params);
    for node in g_in.nodes.into_iter().chain(g_ctx.nodes) {
        merged.upsert_node(node)?;
    }
    for edge in g_in.edges.into_iter().chain(g_ctx.edges) {
        merged.push_edge(edge);
    }
    Ok(merged)
}

/// Add SIMILAR edges for every cross-group entity pair whose similarity
/// reaches `tau`. The matrix must cover every (input label, context label)
/// pair; edges are stored input -> context with `weight = sim`,
/// `cost = 1 - sim`. Structural edges and relation nodes are untouched.
pub fn add_similarity_edges(
    mut g: EntityGraph,
    sim: &SimilarityMatrix,
    tau: f64,
) -> Result<EntityGraph> {
    if !(0.0..=1.0).contains(&tau) || tau.is_nan() {
        return Err(Error::Config(format!("tau must lie in [0,1], got {tau}")));
    }
    g.params.tau = tau;

    let inputs: Vec<(NodeId, String)> = g
        .entity_nodes(Group::Input)
        .map(|n| (n.id.clone(), n.original_label.clone()))
        .collect();
    let contexts: Vec<(NodeId, String)> = g
        .entity_nodes(Group::Context)
        .map(|n| (n.id.clone(), n.original_label.clone()))
        .collect();

    for (in_id, in_label) in &inputs {
        for (ctx_id, ctx_label) in &contexts {
            let value = sim.get(in_label, ctx_label).ok_or_else(|| {
                Error::ProviderContract(format!(
                    "similarity matrix is missing the pair ('{in_label}', '{ctx_label}')"
                ))
            })?;
            if value >= tau {
                g.push_edge(Edge {
                    source: in_id.clone(),
                    target: ctx_id.clone(),
                    kind: EdgeKind::Similar,
                    weight: value,
                    cost: 1.0 - value,
                });
            }
        }
    }
    Ok(g)
}

/// Full pipeline: subgraphs, merge, then SIMILAR edges from a similarity
/// provider. Deterministic given identical inputs and provider outputs.
pub fn build_entity_relation_graph(
    input_triplets: &[Triplet],
    context_triplets: &[Triplet],
    similarity: &dyn crate::providers::SimilarityProvider,
    params: &GraphParams,
) -> Result<EntityGraph> {
    let g_in = triplets_to_subgraph(input_triplets, Group::Input, params)?;
    let g_ctx = triplets_to_subgraph(context_triplets, Group::Context, params)?;
    let merged = merge_graphs(g_in, g_ctx)?;

    let input_labels = merged.entity_labels(Group::Input);
    let context_labels = merged.entity_labels(Group::Context);
    if input_labels.is_empty() || context_labels.is_empty() {
        return Ok(merged);
    }
    let matrix = similarity.similarity_matrix(&input_labels, &context_labels)?;
    add_similarity_edges(merged, &matrix, params.tau)
}
