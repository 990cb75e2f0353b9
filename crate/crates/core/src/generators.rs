// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Synthetic graph families used by tests, benches and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

pub fn path(n: usize) -> Graph {
    Graph::from_unit_edges(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
}

/// `side × side` grid, node `(r, c)` has id `r * side + c`.
pub fn grid(side: usize) -> Graph {
    grid2d(side, side)
}

pub fn grid2d(rows: usize, cols: usize) -> Graph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::from_unit_edges(rows * cols, edges).expect("valid grid")
}

/// Star on `n` nodes with center 0.
pub fn star(n: usize) -> Graph {
    Graph::from_unit_edges(n, (1..n).map(|i| (0, i))).expect("valid star")
}

pub fn clique(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_unit_edges(n, edges).expect("valid clique")
}

/// G(n, p). Not necessarily connected.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    if p > 0.0 && n > 1 {
        // Geometric skipping over the upper triangle keeps this O(n + m).
        let total = n * (n - 1) / 2;
        let log_q = (1.0 - p.min(1.0 - 1e-15)).ln();
        let mut idx: usize = 0;
        let mut first = true;
        loop {
            let r: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
            let skip = if p >= 1.0 { 0 } else { (r.ln() / log_q).floor() as usize };
            idx = if first { skip } else { idx + 1 + skip };
            first = false;
            if idx >= total {
                break;
            }
            edges.push(triangle_pair(idx));
        }
    }
    Graph::from_unit_edges(n, edges).expect("valid G(n, p)")
}

/// Maps a linear index into the strict upper triangle to `(u, v)`, `u < v`,
/// ordering pairs by `v` then `u`.
fn triangle_pair(idx: usize) -> (usize, usize) {
    let mut v = (((8.0 * idx as f64 + 1.0).sqrt() + 1.0) / 2.0).floor() as usize;
    while v * (v - 1) / 2 > idx {
        v -= 1;
    }
    while (v + 1) * v / 2 <= idx {
        v += 1;
    }
    (idx - v * (v - 1) / 2, v)
}

/// Barabási–Albert preferential attachment: starts from a clique on
/// `attach + 1` nodes, then each new node links to `attach` distinct
/// existing nodes chosen proportionally to degree. Always connected.
pub fn barabasi_albert(n: usize, attach: usize, seed: u64) -> Graph {
    let attach = attach.max(1);
    let core = (attach + 1).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n * attach);
    let mut ends: Vec<usize> = Vec::with_capacity(2 * n * attach);
    for u in 0..core {
        for v in u + 1..core {
            edges.push((u, v));
            ends.extend([u, v]);
        }
    }
    let mut targets = Vec::with_capacity(attach);
    for u in core..n {
        targets.clear();
        while targets.len() < attach {
            let t = ends[rng.gen_range(0..ends.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, u));
            ends.extend([t, u]);
        }
    }
    Graph::from_unit_edges(n, edges).expect("valid BA graph")
}

/// Random connected graph: a random spanning tree plus `extra` random edges.
/// When `weighted`, weights are drawn uniformly from `[0.5, 2)`.
pub fn random_connected(n: usize, extra: usize, weighted: bool, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(n + extra);
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        edges.push((parent, order[i]));
    }
    if n > 1 {
        for _ in 0..extra {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                edges.push((u, v));
            }
        }
    }
    let weighted_edges: Vec<(usize, usize, f64)> = edges
        .into_iter()
        .map(|(u, v)| (u, v, if weighted { rng.gen_range(0.5..2.0) } else { 1.0 }))
        .collect();
    Graph::from_edges(n, weighted_edges).expect("valid random graph")
}
