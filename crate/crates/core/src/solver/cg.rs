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

//! Jacobi-preconditioned conjugate gradients on the range of a Laplacian.

use crate::sparse::{center, dot, norm2, CsrMatrix};

pub struct CgOutcome {
    pub x: Vec<f64>,
    pub relative_residual: f64,
    pub iterations: usize,
}

/// Iterates from `x0` until `‖b - Lx‖ ≤ tol · ‖b‖` or `max_iter` is hit.
/// `b` must be balanced; iterates are kept mean-centered.
pub fn conjugate_gradient(
    l: &CsrMatrix,
    diag: &[f64],
    b: &[f64],
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> CgOutcome {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = x0.to_vec();
    center(&mut x);
    if bnorm == 0.0 {
        return CgOutcome { x: vec![0.0; n], relative_residual: 0.0, iterations: 0 };
    }
    let inv_diag: Vec<f64> = diag.iter().map(|&d| if d > 0.0 { 1.0 / d } else { 0.0 }).collect();
    let mut r = l.mul_vec(&x);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let precondition = |r: &[f64], z: &mut Vec<f64>| {
        z.clear();
        z.extend(r.iter().zip(&inv_diag).map(|(a, b)| a * b));
        center(z);
    };
    let mut z = Vec::with_capacity(n);
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut lp = vec![0.0; n];
    let mut best_x = x.clone();
    let mut best = norm2(&r) / bnorm;
    let mut iterations = 0;
    while best > tol && iterations < max_iter {
        iterations += 1;
        l.mul_vec_into(&p, &mut lp);
        let plp = dot(&p, &lp);
        if !(plp > 0.0) {
            break;
        }
        let alpha = rz / plp;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * lp[i];
        }
        let rel = norm2(&r) / bnorm;
        if rel < best {
            best = rel;
            best_x.copy_from_slice(&x);
        }
        precondition(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    center(&mut best_x);
    // Recompute the true residual; the recursive one drifts.
    let lx = l.mul_vec(&best_x);
    let true_rel = lx.iter().zip(b).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt() / bnorm;
    CgOutcome { x: best_x, relative_residual: true_rel, iterations }
}
