//! Graph export: node-link JSON and DOT text with group clusters.

use serde_json::{json, Value};

use crate::config::EvalConfig;
use crate::error::Result;
use crate::graph::{EdgeKind, EntityGraph, Group};
use crate::scoring::{louvain_partition, shortest_costs, Traversal};

/// Node-link JSON document:
/// `{nodes:[{id,label,type,group}], edges:[{source,target,kind,weight,cost}]}`.
pub fn to_node_link_json(g: &EntityGraph) -> Value {
    json!({
        "nodes": g.nodes().iter().map(|n| json!({
            "id": n.id.as_str(),
            "label": n.original_label,
            "type": n.node_type.to_string(),
            "group": n.group.to_string(),
        })).collect::<Vec<_>>(),
        "edges": g.edges().iter().map(|e| json!({
            "source": e.source.as_str(),
            "target": e.target.as_str(),
            "kind": match e.kind { EdgeKind::Structural => "structural", EdgeKind::Similar => "SIMILAR" },
            "weight": e.weight,
            "cost": e.cost,
        })).collect::<Vec<_>>(),
    })
}

/// Node-link JSON with a per-node diagnostic dump attached: the Louvain
/// community label and, for input entity nodes, the cheapest path cost to
/// any context entity node (absent when unreachable).
pub fn to_node_link_json_with_diagnostics(g: &EntityGraph, cfg: &EvalConfig) -> Result<Value> {
    let mut doc = to_node_link_json(g);
    let partition = louvain_partition(g, cfg.seed, cfg.resolution)?;
    let traversal = Traversal::from_directed_flag(cfg.directed_traversal);

    let context_entities: Vec<_> = g.entity_nodes(Group::Context).map(|n| n.id.clone()).collect();
    let nodes = doc["nodes"].as_array_mut().expect("document shape is fixed");
    for (node, value) in g.nodes().iter().zip(nodes.iter_mut()) {
        let object = value.as_object_mut().expect("node entries are objects");
        if let Some(community) = partition.community_of(&node.id) {
            object.insert("community".to_string(), json!(community));
        }
        if node.is_entity() && node.group == Group::Input {
            let costs = shortest_costs(g, &node.id, traversal)?;
            let best = context_entities
                .iter()
                .filter_map(|ctx| costs.cost_to(ctx))
                .min_by(f64::total_cmp);
            if let Some(best) = best {
                object.insert("cost_to_context".to_string(), json!(best));
            }
        }
    }
    Ok(doc)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT text with one cluster per group; SIMILAR edges are dashed and
/// labeled with their weight.
pub fn to_dot(g: &EntityGraph) -> String {
    let mut out = String::from("digraph kgeval {\n  rankdir=LR;\n  node [fontsize=10];\n");
    for group in [Group::Input, Group::Context] {
        out.push_str(&format!(
            "  subgraph cluster_{group} {{\n    label=\"{group}\";\n    color=gray;\n"
        ));
        for node in g.nodes().iter().filter(|n| n.group == group) {
            let shape = if node.is_entity() { "ellipse" } else { "box" };
            out.push_str(&format!(
                "    \"{}\" [label=\"{}\", shape={shape}];\n",
                dot_escape(node.id.as_str()),
                dot_escape(&node.original_label)
            ));
        }
        out.push_str("  }\n");
    }
    for e in g.edges() {
        let attrs = match e.kind {
            EdgeKind::Structural => format!("weight={:.2}", e.weight),
            EdgeKind::Similar => format!("style=dashed, label=\"{:.2}\", dir=none", e.weight),
        };
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [{attrs}];\n",
            dot_escape(e.source.as_str()),
            dot_escape(e.target.as_str())
        ));
    }
    out.push_str("}\n");
    out
}
