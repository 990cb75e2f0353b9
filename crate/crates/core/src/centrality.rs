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

//! Closeness scores: exact current-flow closeness, its pivot-sampling and
//! random-projection estimates, shortest-path closeness and the degree-based
//! asymptotic score.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph};
use crate::par::{self, Exec};
use crate::resistance::{build_sketch, pseudoinverse_columns};
use crate::solver::{setup, MultigridHierarchy, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    CfExact,
    CfSampling,
    CfProjection,
    SpCloseness,
    DegreeAsymptotic,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::CfExact => "cf-exact",
            Measure::CfSampling => "cf-sampling",
            Measure::CfProjection => "cf-projection",
            Measure::SpCloseness => "sp",
            Measure::DegreeAsymptotic => "degree",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters that produced a score table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeasureParams {
    pub pivots: Option<usize>,
    pub epsilon: Option<f64>,
    /// Sketch dimension used by the projection estimate.
    pub sketch_dim: Option<usize>,
    pub seed: Option<u64>,
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub measure: Measure,
    pub params: MeasureParams,
    pub nodes: Vec<usize>,
    pub scores: Vec<f64>,
    /// Largest relative residual among the solves behind the scores.
    pub max_residual: Option<f64>,
}

impl ScoreTable {
    pub fn score_of(&self, node: usize) -> Option<f64> {
        self.nodes.iter().position(|&u| u == node).map(|i| self.scores[i])
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

fn check_inputs(g: &Graph, query: &[usize]) -> Result<()> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Domain("closeness needs at least two nodes".into()));
    }
    if let Some(&u) = query.iter().find(|&&u| u >= n) {
        return Err(Error::Domain(format!("query node {u} out of range for n = {n}")));
    }
    if !g.is_connected() {
        return Err(Error::Domain("closeness needs a connected graph; extract the LCC first".into()));
    }
    Ok(())
}

fn check_hierarchy(g: &Graph, h: &MultigridHierarchy) -> Result<()> {
    if h.n() != g.n() {
        return Err(Error::Domain("hierarchy does not match the graph".into()));
    }
    Ok(())
}

fn closeness(n: usize, node: usize, distance_sum: f64) -> Result<f64> {
    if !(distance_sum > 0.0) {
        return Err(Error::UndefinedScore { node });
    }
    Ok((n - 1) as f64 / distance_sum)
}

/// Per-solve summary kept by the exact method.
struct ColumnSummary {
    diagonal: f64,
    at_query: Vec<f64>,
    total: f64,
    residual: f64,
}

/// `c(v) = (n - 1) / Σ_w d(v, w)` with resistances from one pseudoinverse
/// column per node (n solves shared by all query nodes).
pub fn cf_closeness_exact(g: &Graph, h: &MultigridHierarchy, query: &[usize]) -> Result<ScoreTable> {
    check_inputs(g, query)?;
    check_hierarchy(g, h)?;
    let n = g.n();
    let all: Vec<usize> = (0..n).collect();
    let cfg = h.config();
    let summaries: Vec<ColumnSummary> = par::map_indexed(cfg.exec, &all, |_, &w| {
        let z = pseudoinverse_columns(h, &[w])?.pop().expect("one column");
        Ok(ColumnSummary {
            diagonal: z.values[w],
            at_query: query.iter().map(|&v| z.values[v]).collect(),
            total: z.values.iter().sum(),
            residual: z.achieved_residual,
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;

    // Σ_w d(v,w) = n z_v(v) - Σ_w z_v(w) - Σ_w z_w(v) + Σ_w z_w(w)
    let trace: f64 = summaries.iter().map(|s| s.diagonal).sum();
    let mut scores = Vec::with_capacity(query.len());
    for (qi, &v) in query.iter().enumerate() {
        let cross: f64 = summaries.iter().map(|s| s.at_query[qi]).sum();
        let sum = n as f64 * summaries[v].diagonal - summaries[v].total - cross + trace;
        scores.push(closeness(n, v, sum)?);
    }
    Ok(ScoreTable {
        measure: Measure::CfExact,
        params: MeasureParams { tau: Some(cfg.tau), ..Default::default() },
        nodes: query.to_vec(),
        scores,
        max_residual: Some(summaries.iter().map(|s| s.residual).fold(0.0, f64::max)),
    })
}

/// Uniform pivot set of size `k`, drawn without replacement, sorted.
pub fn sample_pivots(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pivots = rand::seq::index::sample(&mut rng, n, k).into_vec();
    pivots.sort_unstable();
    pivots
}

/// Resistances between every query node and every pivot, `out[q][i]`.
/// Uses one pseudoinverse column per distinct node.
fn query_pivot_resistances(
    h: &MultigridHierarchy,
    query: &[usize],
    pivots: &[usize],
) -> Result<(Vec<Vec<f64>>, f64)> {
    let mut nodes: Vec<usize> = query.iter().chain(pivots).copied().collect();
    nodes.sort_unstable();
    nodes.dedup();
    let cfg = h.config();
    // Only the entries at `nodes` are needed from each column.
    let cols: Vec<(Vec<f64>, f64)> = par::map_indexed(cfg.exec, &nodes, |_, &x| {
        let z = pseudoinverse_columns(h, &[x])?.pop().expect("one column");
        Ok((nodes.iter().map(|&u| z.values[u]).collect(), z.achieved_residual))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let pos = |x: usize| nodes.binary_search(&x).expect("node present");
    let z = |x: usize, at: usize| cols[pos(x)].0[pos(at)];
    let table = query
        .iter()
        .map(|&v| {
            pivots
                .iter()
                .map(|&s| if s == v { 0.0 } else { z(v, v) - z(v, s) - z(s, v) + z(s, s) })
                .collect()
        })
        .collect();
    let max_residual = cols.iter().map(|c| c.1).fold(0.0, f64::max);
    Ok((table, max_residual))
}

/// Pivot-sampling estimate `(k / n) · (n - 1) / Σ_i d(v, s_i)` with one
/// pivot set shared by all query nodes.
pub fn cf_closeness_sampling(
    g: &Graph,
    h: &MultigridHierarchy,
    query: &[usize],
    k: usize,
    seed: u64,
) -> Result<ScoreTable> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("pivot count {k} outside 1..={n}")));
    }
    let mut table = cf_closeness_with_pivots(g, h, query, &sample_pivots(n, k, seed))?;
    table.params.seed = Some(seed);
    Ok(table)
}

/// The sampling estimate for a caller-chosen set of distinct pivots.
pub fn cf_closeness_with_pivots(
    g: &Graph,
    h: &MultigridHierarchy,
    query: &[usize],
    pivots: &[usize],
) -> Result<ScoreTable> {
    check_inputs(g, query)?;
    check_hierarchy(g, h)?;
    let n = g.n();
    let k = pivots.len();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("pivot count {k} outside 1..={n}")));
    }
    let mut sorted = pivots.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != k || sorted[k - 1] >= n {
        return Err(Error::Domain("pivots must be distinct nodes of the graph".into()));
    }
    let (table, max_residual) = query_pivot_resistances(h, query, &sorted)?;
    let mut scores = Vec::with_capacity(query.len());
    for (&v, row) in query.iter().zip(&table) {
        let sum: f64 = row.iter().sum();
        let c = closeness(n, v, sum)?;
        scores.push(k as f64 / n as f64 * c);
    }
    Ok(ScoreTable {
        measure: Measure::CfSampling,
        params: MeasureParams { pivots: Some(k), tau: Some(h.config().tau), ..Default::default() },
        nodes: query.to_vec(),
        scores,
        max_residual: Some(max_residual),
    })
}

/// Random-projection estimate `(n - 1) / Σ_{w≠v} ‖Z_v - Z_w‖²`.
pub fn cf_closeness_projection(
    g: &Graph,
    h: &MultigridHierarchy,
    query: &[usize],
    epsilon: f64,
    seed: u64,
) -> Result<ScoreTable> {
    check_inputs(g, query)?;
    check_hierarchy(g, h)?;
    let sk = build_sketch(g, h, epsilon, seed)?;
    let n = g.n();
    let k = sk.k();
    // Σ_w ‖Z_v - Z_w‖² = n‖Z_v‖² - 2⟨Z_v, Σ_w Z_w⟩ + Σ_w ‖Z_w‖²
    let mut column_sum = vec![0.0; k];
    let mut total_sq = 0.0;
    for u in 0..n {
        let c = sk.column(u);
        for (s, x) in column_sum.iter_mut().zip(c) {
            *s += x;
        }
        total_sq += c.iter().map(|x| x * x).sum::<f64>();
    }
    let mut scores = Vec::with_capacity(query.len());
    for &v in query {
        let c = sk.column(v);
        let own: f64 = c.iter().map(|x| x * x).sum();
        let cross: f64 = c.iter().zip(&column_sum).map(|(a, b)| a * b).sum();
        let sum = n as f64 * own - 2.0 * cross + total_sq;
        scores.push(closeness(n, v, sum)?);
    }
    Ok(ScoreTable {
        measure: Measure::CfProjection,
        params: MeasureParams {
            epsilon: Some(epsilon),
            sketch_dim: Some(k),
            seed: Some(seed),
            tau: Some(h.config().tau),
            ..Default::default()
        },
        nodes: query.to_vec(),
        scores,
        max_residual: Some(sk.max_residual()),
    })
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Sum of shortest-path distances from `source`: BFS on unit weights,
/// Dijkstra otherwise.
pub fn shortest_path_distance_sum(g: &Graph, source: usize) -> f64 {
    let n = g.n();
    if g.is_unit_weighted() {
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        let mut total = 0usize;
        while let Some(u) = queue.pop_front() {
            total += dist[u];
            for &v in g.neighbors(u).0 {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        return total as f64;
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem(0.0, source));
    let mut total = 0.0;
    while let Some(HeapItem(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        total += d;
        let (nbrs, ws) = g.neighbors(u);
        for (&v, &w) in nbrs.iter().zip(ws) {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapItem(nd, v));
            }
        }
    }
    total
}

/// Shortest-path closeness `(n - 1) / Σ_{w≠v} d_SP(v, w)`.
pub fn sp_closeness(g: &Graph, query: &[usize]) -> Result<ScoreTable> {
    sp_closeness_with(g, query, Exec::default())
}

pub fn sp_closeness_with(g: &Graph, query: &[usize], exec: Exec) -> Result<ScoreTable> {
    check_inputs(g, query)?;
    let n = g.n();
    let sums = par::map_indexed(exec, query, |_, &v| shortest_path_distance_sum(g, v));
    let scores = query.iter().zip(sums).map(|(&v, s)| closeness(n, v, s)).collect::<Result<_>>()?;
    Ok(ScoreTable {
        measure: Measure::SpCloseness,
        params: MeasureParams::default(),
        nodes: query.to_vec(),
        scores,
        max_residual: None,
    })
}

/// `c_A(v) = (n - 1) / Σ_{w≠v} (1/deg(v) + 1/deg(w))` with weighted degrees.
pub fn degree_asymptotic(g: &Graph, query: &[usize]) -> Result<ScoreTable> {
    check_inputs(g, query)?;
    let n = g.n();
    let inv: Vec<f64> = (0..n).map(|u| 1.0 / g.weighted_degree(u)).collect();
    let total: f64 = inv.iter().sum();
    let scores = query
        .iter()
        .map(|&v| {
            let sum = (n - 1) as f64 * inv[v] + (total - inv[v]);
            closeness(n, v, sum)
        })
        .collect::<Result<_>>()?;
    Ok(ScoreTable {
        measure: Measure::DegreeAsymptotic,
        params: MeasureParams::default(),
        nodes: query.to_vec(),
        scores,
        max_residual: None,
    })
}

/// A measure together with its parameters, evaluated on any graph. Builds
/// the solver hierarchy when the measure needs one.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    CfExact,
    CfSampling { pivots: usize, seed: u64 },
    CfProjection { epsilon: f64, seed: u64 },
    Sp,
    Degree,
}

impl MeasureSpec {
    pub fn measure(&self) -> Measure {
        match self {
            MeasureSpec::CfExact => Measure::CfExact,
            MeasureSpec::CfSampling { .. } => Measure::CfSampling,
            MeasureSpec::CfProjection { .. } => Measure::CfProjection,
            MeasureSpec::Sp => Measure::SpCloseness,
            MeasureSpec::Degree => Measure::DegreeAsymptotic,
        }
    }

    pub fn needs_solver(&self) -> bool {
        matches!(self, MeasureSpec::CfExact | MeasureSpec::CfSampling { .. } | MeasureSpec::CfProjection { .. })
    }

    pub fn evaluate(&self, g: &Graph, query: &[usize], cfg: &SolverConfig) -> Result<ScoreTable> {
        if !self.needs_solver() {
            return self.evaluate_with(g, None, query);
        }
        check_inputs(g, query)?;
        let h = setup(&laplacian(g), cfg)?;
        self.evaluate_with(g, Some(&h), query)
    }

    /// Evaluates with a prebuilt hierarchy (required for current-flow
    /// measures).
    pub fn evaluate_with(&self, g: &Graph, h: Option<&MultigridHierarchy>, query: &[usize]) -> Result<ScoreTable> {
        let need = || h.ok_or_else(|| Error::Domain("current-flow measures need a solver hierarchy".into()));
        match *self {
            MeasureSpec::CfExact => cf_closeness_exact(g, need()?, query),
            MeasureSpec::CfSampling { pivots, seed } => cf_closeness_sampling(g, need()?, query, pivots, seed),
            MeasureSpec::CfProjection { epsilon, seed } => cf_closeness_projection(g, need()?, query, epsilon, seed),
            MeasureSpec::Sp => sp_closeness(g, query),
            MeasureSpec::Degree => degree_asymptotic(g, query),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn h(g: &Graph) -> MultigridHierarchy {
        setup(&laplacian(g), &SolverConfig::default()).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn exact_examples() {
        let k3 = generators::clique(3);
        let t = cf_closeness_exact(&k3, &h(&k3), &[0, 1, 2]).unwrap();
        assert!(t.scores.iter().all(|&c| close(c, 1.5)));
        let p3 = generators::path(3);
        let t = cf_closeness_exact(&p3, &h(&p3), &[0, 1, 2]).unwrap();
        assert!(close(t.scores[0], 2.0 / 3.0));
        assert!(close(t.scores[1], 1.0));
        assert!(close(t.scores[2], 2.0 / 3.0));
    }

    #[test]
    fn sampling_with_all_nodes_is_exact() {
        let g = generators::random_connected(40, 30, true, 8);
        let hh = h(&g);
        let q: Vec<usize> = (0..40).collect();
        let exact = cf_closeness_exact(&g, &hh, &q).unwrap();
        let sampled = cf_closeness_sampling(&g, &hh, &q, 40, 5).unwrap();
        for (a, b) in exact.scores.iter().zip(&sampled.scores) {
            assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn single_pivot_on_itself_is_undefined() {
        let g = generators::path(4);
        let hh = h(&g);
        let pivot = sample_pivots(4, 1, 17)[0];
        assert_eq!(
            cf_closeness_sampling(&g, &hh, &[pivot], 1, 17).unwrap_err(),
            Error::UndefinedScore { node: pivot }
        );
        assert!(matches!(cf_closeness_sampling(&g, &hh, &[0], 0, 1), Err(Error::Domain(_))));
        assert!(matches!(cf_closeness_sampling(&g, &hh, &[0], 5, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn projection_on_p2_within_band() {
        let g = generators::path(2);
        let hh = h(&g);
        for eps in [0.5, 0.2, 0.1] {
            let t = cf_closeness_projection(&g, &hh, &[0], eps, 1).unwrap();
            let c = t.scores[0];
            assert!(c > 0.0);
            assert!(c >= 1.0 / (1.0 + eps) && c <= 1.0 / (1.0 - eps), "eps {eps}: {c}");
        }
    }

    #[test]
    fn projection_closed_form_matches_pairwise_sum() {
        let g = generators::random_connected(60, 50, false, 3);
        let hh = h(&g);
        let sk = build_sketch(&g, &hh, 0.5, 4).unwrap();
        let t = cf_closeness_projection(&g, &hh, &[0, 7, 59], 0.5, 4).unwrap();
        for (i, &v) in [0usize, 7, 59].iter().enumerate() {
            let sum: f64 = (0..60).map(|w| crate::resistance::sketch_distance(&sk, v, w)).sum();
            assert!((t.scores[i] - 59.0 / sum).abs() < 1e-10 * t.scores[i]);
        }
    }

    #[test]
    fn sp_examples() {
        let p3 = generators::path(3);
        let t = sp_closeness(&p3, &[0, 1, 2]).unwrap();
        assert_eq!(t.scores, vec![2.0 / 3.0, 1.0, 2.0 / 3.0]);
        let t = sp_closeness(&generators::clique(3), &[0, 1, 2]).unwrap();
        assert_eq!(t.scores, vec![1.0; 3]);
        let w = Graph::from_edges(3, [(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
        assert_eq!(sp_closeness(&w, &[0]).unwrap().scores, vec![2.0 / 7.0]);
    }

    #[test]
    fn degree_examples() {
        let t = degree_asymptotic(&generators::clique(3), &[0]).unwrap();
        assert!(close(t.scores[0], 1.0));
        let s4 = generators::star(4);
        let t = degree_asymptotic(&s4, &[0, 1]).unwrap();
        assert!(close(t.scores[0], 0.75));
        assert!(close(t.scores[1], 9.0 / 16.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = Graph::from_unit_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(sp_closeness(&g, &[0]), Err(Error::Domain(_))));
        let p = generators::path(3);
        assert!(matches!(degree_asymptotic(&p, &[3]), Err(Error::Domain(_))));
    }
}
