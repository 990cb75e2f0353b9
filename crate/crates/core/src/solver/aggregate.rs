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

//! Aggregation stage: affinity-driven seeded aggregation and the Galerkin
//! coarse operator for piecewise-constant interpolation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sparse::{center, CsrMatrix};

use super::laplacian_from_weights;
use super::smooth::gauss_seidel_forward;

/// Node → aggregate map defining the piecewise-constant interpolation `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregationRecord {
    pub aggregate_of: Vec<usize>,
    pub count: usize,
}

impl AggregationRecord {
    /// `Pᵀ r`: sums over each aggregate.
    pub fn restrict(&self, r: &[f64]) -> Vec<f64> {
        let mut rc = vec![0.0; self.count];
        self.restrict_into(r, &mut rc);
        rc
    }

    pub fn restrict_into(&self, r: &[f64], rc: &mut [f64]) {
        rc.fill(0.0);
        for (i, &a) in self.aggregate_of.iter().enumerate() {
            rc[a] += r[i];
        }
    }

    /// `P e`: copies each aggregate value to its members.
    pub fn prolong(&self, ec: &[f64]) -> Vec<f64> {
        self.aggregate_of.iter().map(|&a| ec[a]).collect()
    }

    pub fn prolong_into(&self, ec: &[f64], e: &mut [f64]) {
        for (ei, &a) in e.iter_mut().zip(&self.aggregate_of) {
            *ei = ec[a];
        }
    }
}

/// Relaxed test vectors, stored node-major: `out[i * count + k]` is the
/// value of vector `k` at node `i`. Each vector starts uniform in [-1, 1],
/// receives `sweeps` Gauss-Seidel sweeps on `L x = 0`, and is mean-centered.
pub fn relaxed_test_vectors(l: &CsrMatrix, count: usize, sweeps: usize, seed: u64) -> Vec<f64> {
    let n = l.rows();
    let diag = l.diagonal();
    let zero = vec![0.0; n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0.0; n * count];
    let mut x = vec![0.0; n];
    for k in 0..count {
        x.iter_mut().for_each(|v| *v = rng.gen_range(-1.0..=1.0));
        for _ in 0..sweeps {
            gauss_seidel_forward(l, &diag, &zero, &mut x);
        }
        center(&mut x);
        for i in 0..n {
            out[i * count + k] = x[i];
        }
    }
    out
}

/// Squared cosine of the angle between the test-vector samples at `u` and `v`.
pub fn affinity(test_vectors: &[f64], count: usize, u: usize, v: usize) -> f64 {
    let xu = &test_vectors[u * count..(u + 1) * count];
    let xv = &test_vectors[v * count..(v + 1) * count];
    let (mut uv, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for k in 0..count {
        uv += xu[k] * xv[k];
        uu += xu[k] * xu[k];
        vv += xv[k] * xv[k];
    }
    if uu == 0.0 || vv == 0.0 {
        return 0.0;
    }
    uv * uv / (uu * vv)
}

/// Greedy seeded aggregation. Nodes are visited in ascending order; an
/// unaggregated node joins the aggregate of the neighboring seed with the
/// largest affinity above `threshold`, otherwise it becomes a seed itself.
/// Returns the Galerkin operator `PᵀLP` and the aggregate map.
pub fn coarsen_aggregate(
    l: &CsrMatrix,
    test_vectors: &[f64],
    count: usize,
    threshold: f64,
) -> (CsrMatrix, AggregationRecord) {
    let n = l.rows();
    const NONE: usize = usize::MAX;
    let mut aggregate_of = vec![NONE; n];
    let mut is_seed = vec![false; n];
    let mut aggregates = 0;
    for u in 0..n {
        if aggregate_of[u] != NONE {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for &v in l.row(u).0 {
            if v == u || !is_seed[v] {
                continue;
            }
            let a = affinity(test_vectors, count, u, v);
            if a > threshold && best.is_none_or(|(b, _)| a > b) {
                best = Some((a, v));
            }
        }
        match best {
            Some((_, seed)) => aggregate_of[u] = aggregate_of[seed],
            None => {
                is_seed[u] = true;
                aggregate_of[u] = aggregates;
                aggregates += 1;
            }
        }
    }
    let record = AggregationRecord { aggregate_of, count: aggregates };
    (galerkin(l, &record), record)
}

/// `PᵀLP` for piecewise-constant `P`: coarse conductances are the summed
/// conductances between aggregates; intra-aggregate edges vanish.
pub fn galerkin(l: &CsrMatrix, record: &AggregationRecord) -> CsrMatrix {
    let mut edges = Vec::with_capacity(l.nnz() / 2);
    for i in 0..l.rows() {
        let (cols, vals) = l.row(i);
        let ai = record.aggregate_of[i];
        for (&c, &v) in cols.iter().zip(vals) {
            let ac = record.aggregate_of[c];
            if c > i && ai != ac {
                edges.push((ai, ac, -v));
            }
        }
    }
    laplacian_from_weights(record.count, edges)
}
