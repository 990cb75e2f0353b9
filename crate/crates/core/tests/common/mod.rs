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

//! Dense reference computations shared by the integration tests.

#![allow(dead_code)]

use cfcc::graph::{laplacian, Graph};

/// Inverse of a dense matrix by Gauss-Jordan with partial pivoting.
pub fn invert(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        inv.swap(c, p);
        let d = a[c][c];
        assert!(d.abs() > 1e-300, "singular matrix");
        for j in 0..n {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for i in 0..n {
            if i != c && a[i][c] != 0.0 {
                let f = a[i][c];
                for j in 0..n {
                    a[i][j] -= f * a[c][j];
                    inv[i][j] -= f * inv[c][j];
                }
            }
        }
    }
    inv
}

/// Moore-Penrose pseudoinverse of a connected graph's Laplacian through
/// `(L + J/n)^-1 - J/n`.
pub fn pseudoinverse(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut l = laplacian(g).to_dense();
    let j = 1.0 / n as f64;
    for row in l.iter_mut() {
        for x in row.iter_mut() {
            *x += j;
        }
    }
    let mut inv = invert(l);
    for row in inv.iter_mut() {
        for x in row.iter_mut() {
            *x -= j;
        }
    }
    inv
}

pub fn resistance_matrix(g: &Graph) -> Vec<Vec<f64>> {
    let p = pseudoinverse(g);
    let n = g.n();
    (0..n).map(|u| (0..n).map(|v| p[u][u] + p[v][v] - 2.0 * p[u][v]).collect()).collect()
}

pub fn closeness_oracle(g: &Graph) -> Vec<f64> {
    let r = resistance_matrix(g);
    let n = g.n();
    r.iter().map(|row| (n - 1) as f64 / row.iter().sum::<f64>()).collect()
}

/// All graphs on `n` labelled nodes, as edge lists, that are connected.
pub fn connected_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let total = 1u64 << pairs.len();
    (0..total).filter_map(move |mask| {
        let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &(u, v))| (u, v));
        let g = Graph::from_unit_edges(n, edges).ok()?;
        g.is_connected().then_some(g)
    })
}
