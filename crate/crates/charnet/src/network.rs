//! Co-occurrence network construction over configurable text windows,
//! with narrative-time slicing.
//!
//! Networks are undirected weighted graphs over characters. Two characters
//! gain edge weight whenever they are both mentioned inside the same
//! window: a sentence (default), a paragraph, or a sliding token window
//! stepping one token at a time. A mention belongs to a window iff its
//! start token does; windows are clipped to the scope under construction.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::annotation::Document;
use crate::diag::{Diagnostic, DiagnosticKind};
use crate::pipeline::Character;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("scope [{start}, {end}) out of bounds for a document of {len} tokens")]
    Scope { start: usize, end: usize, len: usize },
    #[error("invalid slice boundaries: {0}")]
    Boundaries(String),
}

/// Window granularity. Sliding windows have a fixed token width and step
/// by one token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowMode {
    Sentence,
    Paragraph,
    TokenSliding(usize),
}

/// How a window increments a co-present pair: +1 per window, or
/// +min(m_a, m_b) where m_x is the character's mention count inside the
/// window. Binary counting avoids pronoun-frequency inflation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountScheme {
    BinaryPerWindow,
    PairPerMention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub mode: WindowMode,
    pub scheme: CountScheme,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self { mode: WindowMode::Sentence, scheme: CountScheme::BinaryPerWindow }
    }
}

/// Narrative-time slice boundaries as fractions of the token count.
/// Boundary tokens are snapped forward to the next sentence start, so
/// slices always align with sentences.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    boundaries: Vec<f64>,
    pub cumulative: bool,
}

impl SliceSpec {
    pub fn new(boundaries: Vec<f64>, cumulative: bool) -> Result<Self, NetworkError> {
        if boundaries.len() < 2 {
            return Err(NetworkError::Boundaries(
                "need at least two boundaries".to_string(),
            ));
        }
        if boundaries.first() != Some(&0.0) || boundaries.last() != Some(&1.0) {
            return Err(NetworkError::Boundaries(
                "boundaries must start at 0 and end at 1".to_string(),
            ));
        }
        // partial_cmp also rejects NaN boundaries.
        if boundaries
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(NetworkError::Boundaries(
                "boundaries must be strictly increasing".to_string(),
            ));
        }
        Ok(Self { boundaries, cumulative })
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Number of networks this spec produces.
    pub fn slice_count(&self) -> usize {
        self.boundaries.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkNode {
    pub character_id: usize,
    pub name: String,
    /// Mentions of this character inside the network's scope.
    pub mention_count: usize,
}

/// Undirected weighted co-occurrence graph over characters.
///
/// Nodes are exactly the characters with at least one mention in scope
/// (isolated ones included); edge keys are `(low_id, high_id)` pairs and
/// weights are ≥ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterNetwork {
    pub source_id: String,
    pub slice_label: String,
    /// Token range `[start, end)` this network covers.
    pub scope: (usize, usize),
    pub window: WindowSpec,
    /// Ascending character id.
    pub nodes: Vec<NetworkNode>,
    pub edges: BTreeMap<(usize, usize), u64>,
}

impl CharacterNetwork {
    pub fn node_ids(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.character_id).collect()
    }

    pub fn node(&self, character_id: usize) -> Option<&NetworkNode> {
        self.nodes
            .binary_search_by_key(&character_id, |n| n.character_id)
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn edge_weight(&self, a: usize, b: usize) -> Option<u64> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges.get(&key).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Builds the co-occurrence network over `scope` (a `[start, end)` token
/// range).
pub fn build_network(
    doc: &Document,
    chars: &[Character],
    window: WindowSpec,
    scope: (usize, usize),
) -> Result<CharacterNetwork, NetworkError> {
    let len = doc.token_count();
    let (start, end) = scope;
    if start > end || end > len {
        return Err(NetworkError::Scope { start, end, len });
    }

    // Character of each mention start token; a token may start several
    // nested mentions.
    let mut starts_at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for character in chars {
        for &m in &character.mention_indices {
            starts_at
                .entry(doc.mentions[m].start_token)
                .or_default()
                .push(character.character_id);
        }
    }

    let mut mention_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for (&token, ids) in starts_at.range(start..end) {
        let _ = token;
        for &id in ids {
            *mention_counts.entry(id).or_insert(0) += 1;
        }
    }

    let mut edges: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut add_window = |wstart: usize, wend: usize| {
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for (_, ids) in starts_at.range(wstart..wend) {
            for &id in ids {
                *counts.entry(id).or_insert(0) += 1;
            }
        }
        if counts.len() < 2 {
            return;
        }
        let present: Vec<(usize, u64)> = counts.into_iter().collect();
        for (i, &(a, ma)) in present.iter().enumerate() {
            for &(b, mb) in &present[i + 1..] {
                let inc = match window.scheme {
                    CountScheme::BinaryPerWindow => 1,
                    CountScheme::PairPerMention => ma.min(mb),
                };
                *edges.entry((a, b)).or_insert(0) += inc;
            }
        }
    };

    match window.mode {
        WindowMode::Sentence => {
            for &(s, e) in doc.sentences() {
                let (ws, we) = (s.max(start), e.min(end));
                if ws < we {
                    add_window(ws, we);
                }
            }
        }
        WindowMode::Paragraph => {
            for &(s, e) in doc.paragraphs() {
                let (ws, we) = (s.max(start), e.min(end));
                if ws < we {
                    add_window(ws, we);
                }
            }
        }
        WindowMode::TokenSliding(width) => {
            let width = width.max(1);
            let span = end - start;
            if span > 0 {
                let positions = if span > width { span - width + 1 } else { 1 };
                for i in 0..positions {
                    add_window(start + i, (start + i + width).min(end));
                }
            }
        }
    }

    let mut node_by_id: BTreeMap<usize, NetworkNode> = BTreeMap::new();
    for character in chars {
        if let Some(&count) = mention_counts.get(&character.character_id) {
            node_by_id.insert(
                character.character_id,
                NetworkNode {
                    character_id: character.character_id,
                    name: character.canonical_name.clone(),
                    mention_count: count,
                },
            );
        }
    }

    Ok(CharacterNetwork {
        source_id: doc.source_id.clone(),
        slice_label: "full".to_string(),
        scope,
        window,
        nodes: node_by_id.into_values().collect(),
        edges,
    })
}

/// Maps each slice boundary to a token index: floor(fraction × tokens),
/// snapped forward to the next sentence start.
pub fn boundary_tokens(doc: &Document, slices: &SliceSpec) -> Vec<usize> {
    let len = doc.token_count();
    let snap = |t: usize| -> usize {
        doc.sentences()
            .iter()
            .map(|&(s, _)| s)
            .find(|&s| s >= t)
            .unwrap_or(len)
    };
    slices
        .boundaries
        .iter()
        .map(|&f| snap((f * len as f64).floor() as usize))
        .collect()
}

/// Builds one network per slice. Slices that collapse to zero tokens give
/// an empty network plus a diagnostic.
pub fn slice_networks(
    doc: &Document,
    chars: &[Character],
    window: WindowSpec,
    slices: &SliceSpec,
) -> Result<(Vec<CharacterNetwork>, Vec<Diagnostic>), NetworkError> {
    let cuts = boundary_tokens(doc, slices);
    let count = cuts.len() - 1;
    let mut networks = Vec::with_capacity(count);
    let mut diagnostics = Vec::new();

    for i in 0..count {
        let scope = if slices.cumulative {
            (0, cuts[i + 1])
        } else {
            (cuts[i], cuts[i + 1])
        };
        let mut net = build_network(doc, chars, window, scope)?;
        net.slice_label = if count == 1 {
            "full".to_string()
        } else {
            format!("slice{}", i + 1)
        };
        if scope.0 == scope.1 {
            diagnostics.push(Diagnostic::new(
                DiagnosticKind::EmptySlice,
                format!(
                    "slice {} ({}..{}) covers no sentences",
                    net.slice_label, slices.boundaries[i], slices.boundaries[i + 1]
                ),
            ));
        }
        networks.push(net);
    }

    Ok((networks, diagnostics))
}

/// Drops edges below `min_edge_weight`, then nodes with fewer than
/// `min_mentions` mentions along with their incident edges.
pub fn filter_network(
    net: &CharacterNetwork,
    min_edge_weight: u64,
    min_mentions: usize,
) -> CharacterNetwork {
    let nodes: Vec<NetworkNode> = net
        .nodes
        .iter()
        .filter(|n| n.mention_count >= min_mentions)
        .cloned()
        .collect();
    let keep: std::collections::BTreeSet<usize> =
        nodes.iter().map(|n| n.character_id).collect();
    let edges = net
        .edges
        .iter()
        .filter(|&(&(a, b), &w)| w >= min_edge_weight && keep.contains(&a) && keep.contains(&b))
        .map(|(&k, &w)| (k, w))
        .collect();
    CharacterNetwork { nodes, edges, ..net.clone() }
}
