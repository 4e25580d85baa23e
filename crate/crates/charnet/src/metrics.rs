//! Node importance measures and structural descriptors.
//!
//! Importance drives node color and size in rendered figures. Four
//! measures are offered: degree, weighted degree (default), betweenness
//! over unweighted shortest paths, and PageRank over the weighted graph.
//! Betweenness deliberately ignores weights: co-occurrence weights are
//! similarities, not distances.

use std::collections::{BTreeMap, VecDeque};

use crate::network::CharacterNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Degree,
    WeightedDegree,
    Betweenness,
    PageRank,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Degree,
        Measure::WeightedDegree,
        Measure::Betweenness,
        Measure::PageRank,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Measure::Degree => "degree",
            Measure::WeightedDegree => "weighted-degree",
            Measure::Betweenness => "betweenness",
            Measure::PageRank => "pagerank",
        }
    }
}

/// Per-character scores for one measure. Holds exactly one entry per
/// network node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMap {
    pub measure: Measure,
    pub normalized: bool,
    scores: BTreeMap<usize, f64>,
}

impl ScoreMap {
    fn new(measure: Measure, scores: BTreeMap<usize, f64>) -> Self {
        Self { measure, normalized: false, scores }
    }

    pub fn get(&self, character_id: usize) -> Option<f64> {
        self.scores.get(&character_id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.scores.iter().map(|(&id, &s)| (id, s))
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Character ids sorted by descending score, ties by ascending id.
    pub fn ranking(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.scores.keys().copied().collect();
        ids.sort_by(|&a, &b| {
            self.scores[&b]
                .partial_cmp(&self.scores[&a])
                .unwrap()
                .then(a.cmp(&b))
        });
        ids
    }

    /// Divides by the max score; all-zero maps are left untouched.
    pub fn normalize(mut self) -> Self {
        let max = self.scores.values().fold(0.0f64, |m, &v| m.max(v));
        if max > 0.0 {
            for v in self.scores.values_mut() {
                *v /= max;
            }
        }
        self.normalized = true;
        self
    }
}

/// Dense-index view of a network used by the traversal algorithms.
struct Indexed {
    ids: Vec<usize>,
    adj: Vec<Vec<(usize, u64)>>,
}

impl Indexed {
    fn build(net: &CharacterNetwork) -> Self {
        let ids: Vec<usize> = net.nodes.iter().map(|n| n.character_id).collect();
        let pos: BTreeMap<usize, usize> =
            ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        for (&(a, b), &w) in &net.edges {
            let (ia, ib) = (pos[&a], pos[&b]);
            adj[ia].push((ib, w));
            adj[ib].push((ia, w));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { ids, adj }
    }

    fn scores(&self, values: Vec<f64>) -> BTreeMap<usize, f64> {
        self.ids.iter().copied().zip(values).collect()
    }
}

/// Incident edge count (unweighted) or incident weight sum (weighted).
pub fn degree_scores(net: &CharacterNetwork, weighted: bool) -> ScoreMap {
    let ix = Indexed::build(net);
    let values = ix
        .adj
        .iter()
        .map(|list| {
            if weighted {
                // Fold from +0.0: an empty `sum()` would yield -0.0.
                list.iter().fold(0.0, |acc, &(_, w)| acc + w as f64)
            } else {
                list.len() as f64
            }
        })
        .collect();
    let measure = if weighted { Measure::WeightedDegree } else { Measure::Degree };
    ScoreMap::new(measure, ix.scores(values))
}

/// Shortest-path betweenness over the unweighted graph, each unordered
/// pair counted once; disconnected pairs contribute nothing.
pub fn betweenness_scores(net: &CharacterNetwork) -> ScoreMap {
    let ix = Indexed::build(net);
    let n = ix.ids.len();
    let mut central = vec![0.0f64; n];

    for s in 0..n {
        // Brandes accumulation from source s.
        let mut stack = Vec::with_capacity(n);
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![usize::MAX; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &(w, _) in &ix.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                central[w] += delta[w];
            }
        }
    }

    // Each unordered pair was accumulated from both endpoints.
    for v in &mut central {
        *v /= 2.0;
    }
    ScoreMap::new(Measure::Betweenness, ix.scores(central))
}

/// Power iteration on the weighted graph; transition probability along an
/// edge is proportional to its weight. Isolated nodes redistribute their
/// mass uniformly. Scores sum to 1.
pub fn pagerank_scores(
    net: &CharacterNetwork,
    damping: f64,
    tolerance: f64,
    max_iterations: usize,
) -> ScoreMap {
    let ix = Indexed::build(net);
    let n = ix.ids.len();
    if n == 0 {
        return ScoreMap::new(Measure::PageRank, BTreeMap::new());
    }

    let out_weight: Vec<f64> = ix
        .adj
        .iter()
        .map(|list| list.iter().map(|&(_, w)| w as f64).sum())
        .collect();

    let uniform = 1.0 / n as f64;
    let mut rank = vec![uniform; n];
    for _ in 0..max_iterations {
        let dangling: f64 = (0..n)
            .filter(|&v| out_weight[v] == 0.0)
            .map(|v| rank[v])
            .sum();
        let base = (1.0 - damping) * uniform + damping * dangling * uniform;
        let mut next = vec![base; n];
        for v in 0..n {
            if out_weight[v] == 0.0 {
                continue;
            }
            let share = damping * rank[v] / out_weight[v];
            for &(u, w) in &ix.adj[v] {
                next[u] += share * w as f64;
            }
        }
        let diff: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        rank = next;
        if diff < tolerance {
            break;
        }
    }

    ScoreMap::new(Measure::PageRank, ix.scores(rank))
}

/// Connected components as sorted id lists, ordered by smallest member.
pub fn connected_components(net: &CharacterNetwork) -> Vec<Vec<usize>> {
    let ix = Indexed::build(net);
    let n = ix.ids.len();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut component = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            component.push(ix.ids[v]);
            for &(w, _) in &ix.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        component.sort_unstable();
        components.push(component);
    }
    components
}

pub const PAGERANK_DAMPING: f64 = 0.85;
pub const PAGERANK_TOLERANCE: f64 = 1e-8;
pub const PAGERANK_MAX_ITERATIONS: usize = 200;

/// Dispatches to the chosen measure, optionally normalizing by the max
/// score (all-zero maps stay all-zero).
pub fn importance(net: &CharacterNetwork, measure: Measure, normalize: bool) -> ScoreMap {
    let scores = match measure {
        Measure::Degree => degree_scores(net, false),
        Measure::WeightedDegree => degree_scores(net, true),
        Measure::Betweenness => betweenness_scores(net),
        Measure::PageRank => pagerank_scores(
            net,
            PAGERANK_DAMPING,
            PAGERANK_TOLERANCE,
            PAGERANK_MAX_ITERATIONS,
        ),
    };
    if normalize {
        scores.normalize()
    } else {
        scores
    }
}
