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

//! Elimination stage: exact Schur-complement removal of an independent set
//! of low-degree nodes.

use crate::sparse::CsrMatrix;

use super::laplacian_from_weights;

/// Back-substitution data for one elimination step.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationRecord {
    /// Fine ids of the nodes kept on the coarse level; coarse id = position.
    pub kept: Vec<usize>,
    /// Fine ids of the eliminated nodes.
    pub eliminated: Vec<usize>,
    /// Diagonal entry of each eliminated node.
    pub pivots: Vec<f64>,
    /// CSR offsets into `coarse_nbrs`/`weights`, one row per eliminated node.
    pub offsets: Vec<usize>,
    /// Coarse ids of each eliminated node's neighbors.
    pub coarse_nbrs: Vec<usize>,
    /// Conductance to each of those neighbors.
    pub weights: Vec<f64>,
    pub fine_size: usize,
}

impl EliminationRecord {
    pub fn is_empty(&self) -> bool {
        self.eliminated.is_empty()
    }

    pub fn coarse_size(&self) -> usize {
        self.kept.len()
    }

    /// Coarse right-hand side `b_C - L_CF L_FF⁻¹ b_F`. Preserves the sum.
    pub fn restrict(&self, b: &[f64]) -> Vec<f64> {
        let mut bc = vec![0.0; self.kept.len()];
        self.restrict_into(b, &mut bc);
        bc
    }

    pub fn restrict_into(&self, b: &[f64], bc: &mut [f64]) {
        for (c, &i) in self.kept.iter().enumerate() {
            bc[c] = b[i];
        }
        for (k, &f) in self.eliminated.iter().enumerate() {
            let share = b[f] / self.pivots[k];
            for j in self.offsets[k]..self.offsets[k + 1] {
                bc[self.coarse_nbrs[j]] += self.weights[j] * share;
            }
        }
    }

    /// Fine solution from a coarse one: kept values are copied, eliminated
    /// values are recovered by back-substitution.
    pub fn interpolate(&self, xc: &[f64], b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.fine_size];
        self.interpolate_into(xc, b, &mut x);
        x
    }

    pub fn interpolate_into(&self, xc: &[f64], b: &[f64], x: &mut [f64]) {
        for (c, &i) in self.kept.iter().enumerate() {
            x[i] = xc[c];
        }
        for (k, &f) in self.eliminated.iter().enumerate() {
            let mut s = b[f];
            for j in self.offsets[k]..self.offsets[k + 1] {
                s += self.weights[j] * xc[self.coarse_nbrs[j]];
            }
            x[f] = s / self.pivots[k];
        }
    }
}

/// Greedily selects, in ascending id order, an independent set of nodes
/// with at most `degree_cap` neighbors and returns the Schur complement on
/// the rest together with the back-substitution record. Returns the input
/// unchanged with an empty record when nothing is eligible.
pub fn coarsen_eliminate(l: &CsrMatrix, degree_cap: usize) -> (CsrMatrix, EliminationRecord) {
    let n = l.rows();
    let off_degree = |i: usize| l.row(i).0.iter().filter(|&&c| c != i).count();

    let mut blocked = vec![false; n];
    let mut is_elim = vec![false; n];
    for i in 0..n {
        if blocked[i] || off_degree(i) > degree_cap {
            continue;
        }
        // Keep at least one node: an isolated 1×1 level is never eliminated.
        if off_degree(i) == 0 {
            continue;
        }
        is_elim[i] = true;
        blocked[i] = true;
        for &c in l.row(i).0 {
            blocked[c] = true;
        }
    }

    let mut coarse_id = vec![usize::MAX; n];
    let mut kept = Vec::new();
    let mut eliminated = Vec::new();
    for i in 0..n {
        if is_elim[i] {
            eliminated.push(i);
        } else {
            coarse_id[i] = kept.len();
            kept.push(i);
        }
    }

    let mut record = EliminationRecord {
        kept,
        eliminated,
        pivots: Vec::new(),
        offsets: vec![0],
        coarse_nbrs: Vec::new(),
        weights: Vec::new(),
        fine_size: n,
    };
    if record.eliminated.is_empty() {
        return (l.clone(), record);
    }

    let mut edges = Vec::with_capacity(l.nnz());
    for &i in &record.kept {
        let (cols, vals) = l.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            if c > i && !is_elim[c] {
                edges.push((coarse_id[i], coarse_id[c], -v));
            }
        }
    }
    let mut local: Vec<(usize, f64)> = Vec::new();
    for &f in &record.eliminated {
        let (cols, vals) = l.row(f);
        local.clear();
        let mut pivot = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            if c == f {
                pivot = v;
            } else {
                local.push((coarse_id[c], -v));
            }
        }
        for (a, &(ca, wa)) in local.iter().enumerate() {
            for &(cb, wb) in &local[a + 1..] {
                edges.push((ca, cb, wa * wb / pivot));
            }
        }
        record.pivots.push(pivot);
        for &(c, w) in &local {
            record.coarse_nbrs.push(c);
            record.weights.push(w);
        }
        record.offsets.push(record.coarse_nbrs.len());
    }
    let coarse = laplacian_from_weights(record.kept.len(), edges);
    (coarse, record)
}
