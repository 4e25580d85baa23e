//! Network serialization: GEXF 1.3, GraphML, Graphviz DOT and JSON.
//!
//! All four formats carry the same graph: node ids, labels, mention
//! counts, optional importance scores, and integer edge weights. Output is
//! deterministic — nodes in ascending character id, edges in ascending
//! `(source, target)` order — so repeated exports are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::ScoreMap;
use crate::network::{CharacterNetwork, NetworkNode, WindowSpec};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("network JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("network JSON: {0}")]
    Schema(String),
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn score_of(scores: Option<&ScoreMap>, id: usize) -> Option<f64> {
    scores.and_then(|s| s.get(id))
}

/// GEXF 1.3, undirected, with a node attribute "importance" when scores
/// are given.
pub fn to_gexf(net: &CharacterNetwork, scores: Option<&ScoreMap>) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<gexf xmlns=\"http://gexf.net/1.3\" version=\"1.3\">\n");
    out.push_str("  <meta>\n    <creator>charnet</creator>\n");
    let _ = writeln!(
        out,
        "    <description>{} ({})</description>",
        xml_escape(&net.source_id),
        xml_escape(&net.slice_label)
    );
    out.push_str("  </meta>\n");
    out.push_str("  <graph defaultedgetype=\"undirected\">\n");
    out.push_str("    <attributes class=\"node\">\n");
    if scores.is_some() {
        out.push_str("      <attribute id=\"0\" title=\"importance\" type=\"double\"/>\n");
    }
    out.push_str("      <attribute id=\"1\" title=\"mentions\" type=\"long\"/>\n");
    out.push_str("    </attributes>\n");
    out.push_str("    <nodes>\n");
    for node in &net.nodes {
        let _ = writeln!(
            out,
            "      <node id=\"{}\" label=\"{}\">",
            node.character_id,
            xml_escape(&node.name)
        );
        out.push_str("        <attvalues>\n");
        if let Some(s) = score_of(scores, node.character_id) {
            let _ = writeln!(out, "          <attvalue for=\"0\" value=\"{s}\"/>");
        }
        let _ = writeln!(
            out,
            "          <attvalue for=\"1\" value=\"{}\"/>",
            node.mention_count
        );
        out.push_str("        </attvalues>\n      </node>\n");
    }
    out.push_str("    </nodes>\n    <edges>\n");
    for (idx, (&(a, b), &w)) in net.edges.iter().enumerate() {
        let _ = writeln!(
            out,
            "      <edge id=\"{idx}\" source=\"{a}\" target=\"{b}\" weight=\"{w}\"/>"
        );
    }
    out.push_str("    </edges>\n  </graph>\n</gexf>\n");
    out
}

/// GraphML with `label`, `importance`, `mentions` node keys and a `weight`
/// edge key.
pub fn to_graphml(net: &CharacterNetwork, scores: Option<&ScoreMap>) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(concat!(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"",
        " xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"",
        " xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns",
        " http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n"
    ));
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    if scores.is_some() {
        out.push_str(
            "  <key id=\"importance\" for=\"node\" attr.name=\"importance\" attr.type=\"double\"/>\n",
        );
    }
    out.push_str(
        "  <key id=\"mentions\" for=\"node\" attr.name=\"mentions\" attr.type=\"long\"/>\n",
    );
    out.push_str(
        "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n",
    );
    out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    for node in &net.nodes {
        let _ = writeln!(out, "    <node id=\"n{}\">", node.character_id);
        let _ = writeln!(
            out,
            "      <data key=\"label\">{}</data>",
            xml_escape(&node.name)
        );
        if let Some(s) = score_of(scores, node.character_id) {
            let _ = writeln!(out, "      <data key=\"importance\">{s}</data>");
        }
        let _ = writeln!(
            out,
            "      <data key=\"mentions\">{}</data>",
            node.mention_count
        );
        out.push_str("    </node>\n");
    }
    for (idx, (&(a, b), &w)) in net.edges.iter().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{idx}\" source=\"n{a}\" target=\"n{b}\">\n      \
             <data key=\"weight\">{w}</data>\n    </edge>"
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz DOT (undirected).
pub fn to_dot(net: &CharacterNetwork, scores: Option<&ScoreMap>) -> String {
    let mut out = String::from("graph charnet {\n");
    for node in &net.nodes {
        let _ = write!(
            out,
            "  n{} [label=\"{}\", mentions={}",
            node.character_id,
            dot_escape(&node.name),
            node.mention_count
        );
        if let Some(s) = score_of(scores, node.character_id) {
            let _ = write!(out, ", importance={s}");
        }
        out.push_str("];\n");
    }
    for (&(a, b), &w) in &net.edges {
        let _ = writeln!(out, "  n{a} -- n{b} [weight={w}];");
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonNode {
    id: usize,
    label: String,
    mentions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    importance: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonEdge {
    source: usize,
    target: usize,
    weight: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonScope {
    start: usize,
    end: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonNetwork {
    nodes: Vec<JsonNode>,
    edges: Vec<JsonEdge>,
    scope: JsonScope,
}

/// JSON with schema `{nodes: [{id, label, mentions, importance}], edges:
/// [{source, target, weight}], scope: {start, end}}`.
pub fn to_json(net: &CharacterNetwork, scores: Option<&ScoreMap>) -> String {
    let doc = JsonNetwork {
        nodes: net
            .nodes
            .iter()
            .map(|n| JsonNode {
                id: n.character_id,
                label: n.name.clone(),
                mentions: n.mention_count,
                importance: score_of(scores, n.character_id),
            })
            .collect(),
        edges: net
            .edges
            .iter()
            .map(|(&(a, b), &w)| JsonEdge { source: a, target: b, weight: w })
            .collect(),
        scope: JsonScope { start: net.scope.0, end: net.scope.1 },
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("network serializes");
    out.push('\n');
    out
}

/// Reads a network back from its JSON form. The source id and slice label
/// are not part of the schema; callers set them from context.
pub fn network_from_json(text: &str) -> Result<CharacterNetwork, ExportError> {
    let doc: JsonNetwork = serde_json::from_str(text)?;
    let mut nodes: Vec<NetworkNode> = doc
        .nodes
        .iter()
        .map(|n| NetworkNode {
            character_id: n.id,
            name: n.label.clone(),
            mention_count: n.mentions,
        })
        .collect();
    nodes.sort_by_key(|n| n.character_id);
    if nodes.windows(2).any(|w| w[0].character_id == w[1].character_id) {
        return Err(ExportError::Schema("duplicate node id".to_string()));
    }
    let ids: std::collections::BTreeSet<usize> =
        nodes.iter().map(|n| n.character_id).collect();
    let mut edges: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for edge in &doc.edges {
        if edge.source == edge.target {
            return Err(ExportError::Schema(format!(
                "self-loop on node {}",
                edge.source
            )));
        }
        if !ids.contains(&edge.source) || !ids.contains(&edge.target) {
            return Err(ExportError::Schema(format!(
                "edge {}–{} references an unknown node",
                edge.source, edge.target
            )));
        }
        if edge.weight == 0 {
            return Err(ExportError::Schema(format!(
                "edge {}–{} has zero weight",
                edge.source, edge.target
            )));
        }
        let key = if edge.source < edge.target {
            (edge.source, edge.target)
        } else {
            (edge.target, edge.source)
        };
        if edges.insert(key, edge.weight).is_some() {
            return Err(ExportError::Schema(format!(
                "duplicate edge {}–{}",
                key.0, key.1
            )));
        }
    }
    if doc.scope.start > doc.scope.end {
        return Err(ExportError::Schema("scope start exceeds end".to_string()));
    }
    Ok(CharacterNetwork {
        source_id: String::new(),
        slice_label: "full".to_string(),
        scope: (doc.scope.start, doc.scope.end),
        window: WindowSpec::default(),
        nodes,
        edges,
    })
}
