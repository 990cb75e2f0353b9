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

//! Effective resistance: exact via Laplacian solves and approximate via a
//! Johnson–Lindenstrauss sketch of `W^{1/2} B L†`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{incidence_and_weights, Graph};
use crate::par;
use crate::solver::{solve, solve_many, MultigridHierarchy, PotentialVector};

/// Unit current injected at `source` and extracted at `sink`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupplySpec {
    pub source: usize,
    pub sink: usize,
}

impl SupplySpec {
    pub fn new(source: usize, sink: usize) -> Result<Self> {
        if source == sink {
            return Err(Error::Domain(format!("supply needs distinct source and sink, got {source} twice")));
        }
        Ok(SupplySpec { source, sink })
    }

    /// `b` with `b(source) = +1`, `b(sink) = -1`, zero elsewhere.
    pub fn to_vector(&self, n: usize) -> Vec<f64> {
        let mut b = vec![0.0; n];
        b[self.source] = 1.0;
        b[self.sink] = -1.0;
        b
    }
}

fn check_node(h: &MultigridHierarchy, u: usize) -> Result<()> {
    if u >= h.n() {
        return Err(Error::Domain(format!("node {u} out of range for n = {}", h.n())));
    }
    Ok(())
}

/// `p(u) - p(v)` for the potentials of a unit `u → v` current; exactly 0
/// when `u == v`.
pub fn effective_resistance(h: &MultigridHierarchy, u: usize, v: usize) -> Result<f64> {
    check_node(h, u)?;
    check_node(h, v)?;
    if u == v {
        return Ok(0.0);
    }
    let b = SupplySpec::new(u, v)?.to_vector(h.n());
    let p = solve(h, &b, h.config())?;
    Ok(p.values[u] - p.values[v])
}

/// Mean-centered solutions of `L z_x = e_x - 1/n`, one per node in `nodes`.
/// Each `z_x` is column `x` of the pseudoinverse up to solver tolerance.
pub(crate) fn pseudoinverse_columns(h: &MultigridHierarchy, nodes: &[usize]) -> Result<Vec<PotentialVector>> {
    let n = h.n();
    let cfg = h.config();
    let solved = par::map_indexed(cfg.exec, nodes, |_, &x| {
        let mut b = vec![-1.0 / n as f64; n];
        b[x] += 1.0;
        solve(h, &b, cfg)
    });
    solved.into_iter().collect()
}

/// Resistances from `v` to every node in `targets`, via
/// `d(v, w) = z_v(v) - z_v(w) - z_w(v) + z_w(w)`. Costs one solve per
/// distinct node instead of one per pair.
pub fn resistances_from_node(h: &MultigridHierarchy, v: usize, targets: &[usize]) -> Result<Vec<f64>> {
    check_node(h, v)?;
    for &w in targets {
        check_node(h, w)?;
    }
    let mut nodes: Vec<usize> = targets.iter().copied().chain([v]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    let cols = pseudoinverse_columns(h, &nodes)?;
    let col = |x: usize| &cols[nodes.binary_search(&x).unwrap()].values;
    let zv = col(v);
    Ok(targets
        .iter()
        .map(|&w| if w == v { 0.0 } else { zv[v] - zv[w] - col(w)[v] + col(w)[w] })
        .collect())
}

/// `⌈ln n / ε²⌉`.
pub fn sketch_dimension(n: usize, epsilon: f64) -> usize {
    ((n as f64).ln() / (epsilon * epsilon)).ceil().max(1.0) as usize
}

/// The k × n matrix `Z` whose column distances approximate effective
/// resistances. Stored node-major so that a node's column is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceSketch {
    k: usize,
    n: usize,
    epsilon: f64,
    seed: u64,
    columns: Vec<f64>,
    max_residual: f64,
}

impl ResistanceSketch {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Largest relative residual over the k solves.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// Column `u` of `Z`.
    pub fn column(&self, u: usize) -> &[f64] {
        &self.columns[u * self.k..(u + 1) * self.k]
    }

    /// Row `i` of `Z`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|u| self.columns[u * self.k + i]).collect()
    }
}

/// Builds the sketch: a Rademacher `Q` (k × m, entries ±1/√k), `Y = Q W^{1/2} B`
/// by sparse accumulation, then one Laplacian solve per row of `Y`.
pub fn build_sketch(g: &Graph, h: &MultigridHierarchy, epsilon: f64, seed: u64) -> Result<ResistanceSketch> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let n = g.n();
    if h.n() != n {
        return Err(Error::Domain("hierarchy does not match the graph".into()));
    }
    if n < 2 || !g.is_connected() {
        return Err(Error::Domain("sketch needs a connected graph with at least two nodes".into()));
    }
    let k = sketch_dimension(n, epsilon);
    let (b, w) = incidence_and_weights(g);
    let scale = 1.0 / (k as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(k);
    for _ in 0..k {
        let mut y = vec![0.0; n];
        for (e, &we) in w.iter().enumerate() {
            let q = if rng.gen::<bool>() { scale } else { -scale };
            let (cols, vals) = b.row(e);
            let c = q * we.sqrt();
            for (&u, &bv) in cols.iter().zip(vals) {
                y[u] += c * bv;
            }
        }
        let l1: f64 = y.iter().map(|v| v.abs()).sum();
        let sum: f64 = y.iter().sum();
        assert!(sum.abs() <= 1e-10 * l1.max(f64::MIN_POSITIVE), "sketch right-hand side must sum to zero");
        rows.push(y);
    }
    let solved: Vec<PotentialVector> = solve_many(h, &rows, h.config()).into_iter().collect::<Result<_>>()?;
    let mut columns = vec![0.0; n * k];
    let mut max_residual: f64 = 0.0;
    for (i, p) in solved.iter().enumerate() {
        max_residual = max_residual.max(p.achieved_residual);
        for (u, &z) in p.values.iter().enumerate() {
            columns[u * k + i] = z;
        }
    }
    Ok(ResistanceSketch { k, n, epsilon, seed, columns, max_residual })
}

/// `‖Z_u - Z_v‖²`.
pub fn sketch_distance(sk: &ResistanceSketch, u: usize, v: usize) -> f64 {
    if u == v {
        return 0.0;
    }
    sk.column(u).iter().zip(sk.column(v)).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::laplacian;
    use crate::solver::{setup, SolverConfig};

    fn hierarchy(g: &Graph) -> MultigridHierarchy {
        setup(&laplacian(g), &SolverConfig::default()).unwrap()
    }

    #[test]
    fn supply_vector() {
        assert_eq!(SupplySpec::new(0, 2).unwrap().to_vector(3), vec![1.0, 0.0, -1.0]);
        assert!(SupplySpec::new(1, 1).is_err());
    }

    #[test]
    fn simple_circuits() {
        let h = hierarchy(&generators::path(2));
        assert!((effective_resistance(&h, 0, 1).unwrap() - 1.0).abs() < 1e-12);
        let h = hierarchy(&generators::path(3));
        assert!((effective_resistance(&h, 0, 2).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(effective_resistance(&h, 1, 1).unwrap(), 0.0);
        assert!(effective_resistance(&h, 0, 3).is_err());
    }

    #[test]
    fn from_node_examples() {
        let h = hierarchy(&generators::path(3));
        assert_eq!(resistances_from_node(&h, 1, &[1]).unwrap(), vec![0.0]);
        let d = resistances_from_node(&h, 0, &[1, 2]).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12 && (d[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sketch_dimension_uses_natural_log() {
        assert_eq!(sketch_dimension(2, 0.5), 3);
        assert_eq!(sketch_dimension(500, 0.2), 156);
        assert_eq!(sketch_dimension(500, 0.5), 25);
    }

    #[test]
    fn sketch_on_p2() {
        let g = generators::path(2);
        let h = hierarchy(&g);
        let sk = build_sketch(&g, &h, 0.5, 3).unwrap();
        assert_eq!(sk.k(), 3);
        let d = sketch_distance(&sk, 0, 1);
        assert!((0.5..=1.5).contains(&d), "{d}");
        assert_eq!(sketch_distance(&sk, 1, 1), 0.0);
        assert_eq!(sketch_distance(&sk, 0, 1), sketch_distance(&sk, 1, 0));
    }

    #[test]
    fn sketch_is_deterministic_and_validates_epsilon() {
        let g = generators::random_connected(80, 60, true, 4);
        let h = hierarchy(&g);
        assert_eq!(build_sketch(&g, &h, 0.5, 9).unwrap(), build_sketch(&g, &h, 0.5, 9).unwrap());
        assert_ne!(build_sketch(&g, &h, 0.5, 9).unwrap(), build_sketch(&g, &h, 0.5, 10).unwrap());
        assert!(matches!(build_sketch(&g, &h, 0.0, 1), Err(Error::Domain(_))));
        assert!(matches!(build_sketch(&g, &h, 1.5, 1), Err(Error::Domain(_))));
    }
}
