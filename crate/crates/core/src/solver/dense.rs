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

//! Direct solve for the coarsest level: Cholesky of the Laplacian with its
//! last node grounded, followed by re-centering.

use crate::sparse::{center, CsrMatrix};

#[derive(Debug, Clone)]
pub struct GroundedCholesky {
    n: usize,
    /// Lower-triangular factor of the leading (n-1) × (n-1) block, row-major.
    factor: Vec<f64>,
}

impl GroundedCholesky {
    /// Factors a connected-graph Laplacian. Returns `None` if the grounded
    /// block is not numerically positive definite.
    pub fn new(l: &CsrMatrix) -> Option<Self> {
        let n = l.rows();
        let k = n.saturating_sub(1);
        let mut a = vec![0.0; k * k];
        for r in 0..k {
            let (cols, vals) = l.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if c < k {
                    a[r * k + c] = v;
                }
            }
        }
        for j in 0..k {
            let mut d = a[j * k + j];
            for p in 0..j {
                d -= a[j * k + p] * a[j * k + p];
            }
            if !(d > 0.0) {
                return None;
            }
            let d = d.sqrt();
            a[j * k + j] = d;
            for i in j + 1..k {
                let mut s = a[i * k + j];
                for p in 0..j {
                    s -= a[i * k + p] * a[j * k + p];
                }
                a[i * k + j] = s / d;
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                a[i * k + j] = 0.0;
            }
        }
        Some(GroundedCholesky { n, factor: a })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Solves `L x = b` for balanced `b`; the result has zero mean.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let k = n.saturating_sub(1);
        let a = &self.factor;
        let mut rhs: Vec<f64> = b.to_vec();
        center(&mut rhs);
        let mut y = vec![0.0; k];
        for i in 0..k {
            let row = &a[i * k..i * k + i];
            let s: f64 = row.iter().zip(&y).map(|(l, y)| l * y).sum();
            y[i] = (rhs[i] - s) / a[i * k + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..k).rev() {
            let mut s = y[i];
            for j in i + 1..k {
                s -= a[j * k + i] * x[j];
            }
            x[i] = s / a[i * k + i];
        }
        center(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::laplacian;

    #[test]
    fn solves_p2() {
        let l = laplacian(&generators::path(2));
        let chol = GroundedCholesky::new(&l).unwrap();
        assert_eq!(chol.solve(&[1.0, -1.0]), vec![0.5, -0.5]);
    }

    #[test]
    fn single_node() {
        let l = CsrMatrix::from_triplets(1, 1, vec![(0, 0, 0.0)]);
        let chol = GroundedCholesky::new(&l).unwrap();
        assert_eq!(chol.solve(&[0.0]), vec![0.0]);
    }

    #[test]
    fn residual_is_tiny_on_random_graph() {
        let g = generators::random_connected(60, 80, true, 5);
        let l = laplacian(&g);
        let chol = GroundedCholesky::new(&l).unwrap();
        let mut b: Vec<f64> = (0..60).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
        center(&mut b);
        let x = chol.solve(&b);
        let r: f64 = l.mul_vec(&x).iter().zip(&b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(r < 1e-10, "residual {r}");
        assert!(x.iter().sum::<f64>().abs() < 1e-12);
    }
}
