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

use crate::sparse::CsrMatrix;

/// One forward Gauss-Seidel sweep on `L x = b`.
pub fn gauss_seidel_forward(l: &CsrMatrix, diag: &[f64], b: &[f64], x: &mut [f64]) {
    for i in 0..l.rows() {
        relax(l, diag, b, x, i);
    }
}

/// One backward Gauss-Seidel sweep, the adjoint of the forward sweep.
pub fn gauss_seidel_backward(l: &CsrMatrix, diag: &[f64], b: &[f64], x: &mut [f64]) {
    for i in (0..l.rows()).rev() {
        relax(l, diag, b, x, i);
    }
}

#[inline]
fn relax(l: &CsrMatrix, diag: &[f64], b: &[f64], x: &mut [f64], i: usize) {
    if diag[i] <= 0.0 {
        return;
    }
    let (cols, vals) = l.row(i);
    let mut s = b[i];
    for (&c, &v) in cols.iter().zip(vals) {
        if c != i {
            s -= v * x[c];
        }
    }
    x[i] = s / diag[i];
}

/// `r = b - L x`.
pub fn residual(l: &CsrMatrix, b: &[f64], x: &[f64], r: &mut [f64]) {
    l.mul_vec_into(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}
