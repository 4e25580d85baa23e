//! Deterministic force-directed layout (Fruchterman–Reingold style).
//!
//! Positions start from a seeded PRNG, then iterate repulsion k²/d between
//! all pairs and attraction d²/k (scaled by edge weight) along edges, with
//! a linearly cooling displacement cap. Final coordinates are rescaled
//! into the unit square, so a single node always lands at (0.5, 0.5).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::CharacterNetwork;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_ITERATIONS: usize = 200;

/// Per-node positions inside `[0,1]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutResult {
    pub seed: u64,
    pub iterations: usize,
    positions: BTreeMap<usize, (f64, f64)>,
}

impl LayoutResult {
    pub fn position(&self, character_id: usize) -> Option<(f64, f64)> {
        self.positions.get(&character_id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, (f64, f64))> + '_ {
        self.positions.iter().map(|(&id, &p)| (id, p))
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

pub fn layout_force_directed(
    net: &CharacterNetwork,
    seed: u64,
    iterations: usize,
) -> LayoutResult {
    let ids: Vec<usize> = net.nodes.iter().map(|n| n.character_id).collect();
    let n = ids.len();
    let mut result = LayoutResult { seed, iterations, positions: BTreeMap::new() };
    if n == 0 {
        return result;
    }

    let index: BTreeMap<usize, usize> =
        ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let edges: Vec<(usize, usize, f64)> = net
        .edges
        .iter()
        .map(|(&(a, b), &w)| (index[&a], index[&b], w as f64))
        .collect();

    // Initial positions drawn in node order from the seeded generator.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x: f64 = rng.gen();
            let y: f64 = rng.gen();
            (x, y)
        })
        .collect();

    let k = (1.0 / n as f64).sqrt();
    let max_step = 0.1;
    let min_dist = 1e-9;

    for iteration in 0..iterations {
        let temperature = max_step * (1.0 - iteration as f64 / iterations as f64);
        let mut disp = vec![(0.0f64, 0.0f64); n];

        for i in 0..n {
            for j in i + 1..n {
                let dx = pos[i].0 - pos[j].0;
                let dy = pos[i].1 - pos[j].1;
                let dist = (dx * dx + dy * dy).sqrt().max(min_dist);
                let force = k * k / dist;
                let (ux, uy) = (dx / dist, dy / dist);
                disp[i].0 += ux * force;
                disp[i].1 += uy * force;
                disp[j].0 -= ux * force;
                disp[j].1 -= uy * force;
            }
        }

        for &(a, b, w) in &edges {
            let dx = pos[a].0 - pos[b].0;
            let dy = pos[a].1 - pos[b].1;
            let dist = (dx * dx + dy * dy).sqrt().max(min_dist);
            let force = dist * dist / k * w;
            let (ux, uy) = (dx / dist, dy / dist);
            disp[a].0 -= ux * force;
            disp[a].1 -= uy * force;
            disp[b].0 += ux * force;
            disp[b].1 += uy * force;
        }

        for i in 0..n {
            let (dx, dy) = disp[i];
            let len = (dx * dx + dy * dy).sqrt();
            if len > min_dist {
                let step = len.min(temperature);
                pos[i].0 += dx / len * step;
                pos[i].1 += dy / len * step;
            }
        }
    }

    // Rescale into the unit square; degenerate axes collapse to 0.5.
    let rescale = |values: Vec<f64>| -> Vec<f64> {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max - min < 1e-12 {
            vec![0.5; values.len()]
        } else {
            values.into_iter().map(|v| (v - min) / (max - min)).collect()
        }
    };
    let xs = rescale(pos.iter().map(|p| p.0).collect());
    let ys = rescale(pos.iter().map(|p| p.1).collect());

    for (i, &id) in ids.iter().enumerate() {
        result.positions.insert(id, (xs[i], ys[i]));
    }
    result
}
