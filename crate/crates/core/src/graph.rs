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

//! Weighted undirected graphs: ingestion, preprocessing and matrix views.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::BufRead;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Immutable weighted undirected graph stored as sorted adjacency lists.
///
/// Node ids are `0..n`. Each node also carries an external label, which is
/// the identifier it had in the input file (or in the graph it was
/// extracted from).
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    labels: Vec<u64>,
    m: usize,
}

impl Graph {
    /// Builds a graph on `n` nodes. Self-loops are dropped and repeated
    /// `{u, v}` pairs are merged by summing their weights.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut list = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::Domain(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::Domain(format!("edge ({u}, {v}) has non-positive weight {w}")));
            }
            if u != v {
                list.push((u.min(v), u.max(v), w));
            }
        }
        list.sort_unstable_by_key(|&(u, v, _)| (u, v));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(list.len());
        for (u, v, w) in list {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += w,
                _ => merged.push((u, v, w)),
            }
        }

        let mut degree = vec![0usize; n];
        for &(u, v, _) in &merged {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for u in 0..n {
            offsets[u + 1] = offsets[u] + degree[u];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0usize; 2 * merged.len()];
        let mut weights = vec![0.0; 2 * merged.len()];
        // Merged edges are sorted by (min, max), so pushing in this order
        // yields sorted adjacency lists on both sides.
        for &(u, v, w) in &merged {
            neighbors[fill[u]] = v;
            weights[fill[u]] = w;
            fill[u] += 1;
        }
        for &(u, v, w) in &merged {
            neighbors[fill[v]] = u;
            weights[fill[v]] = w;
            fill[v] += 1;
        }
        for u in 0..n {
            let span = offsets[u]..offsets[u + 1];
            let mut pairs: Vec<(usize, f64)> =
                neighbors[span.clone()].iter().copied().zip(weights[span.clone()].iter().copied()).collect();
            if pairs.windows(2).any(|p| p[0].0 > p[1].0) {
                pairs.sort_unstable_by_key(|p| p.0);
                for (k, (x, w)) in span.zip(pairs) {
                    neighbors[k] = x;
                    weights[k] = w;
                }
            }
        }

        Ok(Graph {
            offsets,
            neighbors,
            weights,
            labels: (0..n as u64).collect(),
            m: merged.len(),
        })
    }

    /// Unit-weight convenience constructor.
    pub fn from_unit_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Graph::from_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    /// Replaces the external labels.
    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Graph> {
        if labels.len() != self.n() {
            return Err(Error::Domain("label count does not match node count".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, u: usize) -> u64 {
        self.labels[u]
    }

    /// Sorted neighbor ids of `u` and the matching edge weights.
    #[inline]
    pub fn neighbors(&self, u: usize) -> (&[usize], &[f64]) {
        let span = self.offsets[u]..self.offsets[u + 1];
        (&self.neighbors[span.clone()], &self.weights[span])
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Sum of incident edge weights.
    pub fn weighted_degree(&self, u: usize) -> f64 {
        self.neighbors(u).1.iter().sum()
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let (nbrs, ws) = self.neighbors(u);
        nbrs.binary_search(&v).ok().map(|k| ws[k])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_weight(u, v).is_some()
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted by `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |u| {
            let (nbrs, ws) = self.neighbors(u);
            nbrs.iter().zip(ws).filter(move |(&v, _)| v > u).map(move |(&v, &w)| (u, v, w))
        })
    }

    /// Sum of weighted degrees, twice the total edge weight.
    pub fn volume(&self) -> f64 {
        (0..self.n()).map(|u| self.weighted_degree(u)).sum()
    }

    pub fn is_unit_weighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Connected components as lists of node ids, each sorted, ordered by
    /// their smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in self.neighbors(u).0 {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.components().len() == 1
    }

    /// Induced subgraph on `nodes` (sorted ascending). Returns the subgraph
    /// and the old → new id map.
    pub fn induced(&self, nodes: &[usize]) -> (Graph, Vec<Option<usize>>) {
        let mut map = vec![None; self.n()];
        for (new, &old) in nodes.iter().enumerate() {
            map[old] = Some(new);
        }
        let edges: Vec<_> = self
            .edges()
            .filter_map(|(u, v, w)| Some((map[u]?, map[v]?, w)))
            .collect();
        let labels = nodes.iter().map(|&u| self.labels[u]).collect();
        let g = Graph::from_edges(nodes.len(), edges)
            .and_then(|g| g.with_labels(labels))
            .expect("induced subgraph of a valid graph is valid");
        (g, map)
    }
}

/// Options for [`load_edge_list`].
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Node ids in the file start at 1; an id of 0 is rejected.
    pub one_indexed: bool,
}

/// Reads a whitespace-separated edge list, one `u v` or `u v w` per line.
///
/// Lines starting with `#` or `%` are comments. Ids may be non-contiguous;
/// they are compacted in ascending order and kept as node labels. A node
/// that only appears in self-loops does not exist.
pub fn load_edge_list<R: BufRead>(reader: R, options: LoadOptions) -> Result<Graph> {
    let mut raw: Vec<(u64, u64, f64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') || text.starts_with('%') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: lineno, message };
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(parse_err(format!("expected 2 or 3 fields, found {}", fields.len())));
        }
        let id = |s: &str| -> Result<u64> {
            let x: u64 = s.parse().map_err(|_| parse_err(format!("invalid node id {s:?}")))?;
            if options.one_indexed && x == 0 {
                return Err(parse_err("node id 0 in a one-indexed file".into()));
            }
            Ok(x)
        };
        let u = id(fields[0])?;
        let v = id(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => {
                let w: f64 = s.parse().map_err(|_| parse_err(format!("invalid weight {s:?}")))?;
                if w.is_nan() {
                    return Err(parse_err("weight is NaN".into()));
                }
                if !(w > 0.0) || w.is_infinite() {
                    return Err(Error::Domain(format!("line {lineno}: weight {w} must be positive and finite")));
                }
                w
            }
            None => 1.0,
        };
        if u != v {
            raw.push((u, v, w));
        }
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let edges = raw.into_iter().map(|(u, v, w)| (index[&u], index[&v], w));
    Graph::from_edges(ids.len(), edges)?.with_labels(ids)
}

/// Extracts the largest connected component. Ties go to the component with
/// the smallest node id. Returns the component and the old → new id map.
pub fn largest_connected_component(g: &Graph) -> (Graph, Vec<Option<usize>>) {
    let comps = g.components();
    let mut best: Option<&Vec<usize>> = None;
    // Components come ordered by smallest member, so strict `>` keeps the
    // earliest one on ties.
    for c in &comps {
        if best.is_none_or(|b| c.len() > b.len()) {
            best = Some(c);
        }
    }
    match best {
        Some(nodes) => g.induced(nodes),
        None => (g.clone(), Vec::new()),
    }
}

/// Weighted Laplacian `L = D - A`.
pub fn laplacian(g: &Graph) -> CsrMatrix {
    let n = g.n();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::with_capacity(2 * g.m() + n);
    let mut values = Vec::with_capacity(2 * g.m() + n);
    indptr.push(0);
    for u in 0..n {
        let (nbrs, ws) = g.neighbors(u);
        let deg: f64 = ws.iter().sum();
        let mut diag_done = false;
        for (&v, &w) in nbrs.iter().zip(ws) {
            if !diag_done && v > u {
                indices.push(u);
                values.push(deg);
                diag_done = true;
            }
            indices.push(v);
            values.push(-w);
        }
        if !diag_done {
            indices.push(u);
            values.push(deg);
        }
        indptr.push(indices.len());
    }
    CsrMatrix::from_raw(n, n, indptr, indices, values).expect("Laplacian layout is valid")
}

/// Edge-node incidence matrix `B` (m × n) and the edge weights.
///
/// Edges are enumerated by `(min endpoint, max endpoint)`; each row holds +1
/// at the smaller endpoint and -1 at the larger one, so `BᵀWB = L`.
pub fn incidence_and_weights(g: &Graph) -> (CsrMatrix, Vec<f64>) {
    let m = g.m();
    let mut indptr = Vec::with_capacity(m + 1);
    let mut indices = Vec::with_capacity(2 * m);
    let mut values = Vec::with_capacity(2 * m);
    let mut weights = Vec::with_capacity(m);
    indptr.push(0);
    for (u, v, w) in g.edges() {
        indices.extend([u, v]);
        values.extend([1.0, -1.0]);
        weights.push(w);
        indptr.push(indices.len());
    }
    let b = CsrMatrix::from_raw(m, g.n(), indptr, indices, values).expect("incidence layout is valid");
    (b, weights)
}

const NOISE_ATTEMPTS_PER_EDGE: usize = 1000;

/// Adds `⌈fraction · m⌉` unit-weight edges, each joining a uniformly chosen
/// anchor to a uniformly chosen node. Candidates that are self-loops or
/// already present (in `g` or among the new edges) are redrawn.
pub fn insert_noise_edges(g: &Graph, fraction: f64, anchors: &[usize], seed: u64) -> Result<Graph> {
    if !(fraction > 0.0 && fraction <= 0.5) {
        return Err(Error::Domain(format!("noise fraction {fraction} outside (0, 0.5]")));
    }
    if anchors.is_empty() {
        return Err(Error::Domain("noise insertion needs at least one anchor".into()));
    }
    let n = g.n();
    if let Some(&a) = anchors.iter().find(|&&a| a >= n) {
        return Err(Error::Domain(format!("anchor {a} out of range")));
    }
    let count = noise_edge_count(g.m(), fraction);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut added: HashSet<(usize, usize)> = HashSet::with_capacity(count);
    let mut new_edges = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let budget = NOISE_ATTEMPTS_PER_EDGE * count.max(1);
    while new_edges.len() < count {
        if attempts == budget {
            return Err(Error::Capacity(format!(
                "placed {} of {count} noise edges after {budget} attempts",
                new_edges.len()
            )));
        }
        attempts += 1;
        let a = anchors[rng.gen_range(0..anchors.len())];
        let x = rng.gen_range(0..n);
        let key = (a.min(x), a.max(x));
        if a == x || g.has_edge(a, x) || added.contains(&key) {
            continue;
        }
        added.insert(key);
        new_edges.push((key.0, key.1, 1.0));
    }
    Graph::from_edges(n, g.edges().chain(new_edges))?.with_labels(g.labels.clone())
}

/// `⌈fraction · m⌉`, guarded against products like `0.1 · 30` landing just
/// above an integer.
pub fn noise_edge_count(m: usize, fraction: f64) -> usize {
    let x = fraction * m as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}
