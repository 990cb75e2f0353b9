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

//! Compressed sparse row matrices.

use crate::error::{Error, Result};

/// A real matrix in compressed sparse row layout. Column indices within a
/// row are sorted and unique.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicate positions
    /// are summed.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            indices.push(c);
            values.push(v);
            indptr[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix { rows, cols, indptr, indices, values }
    }

    /// Builds a matrix from raw CSR arrays, validating their shape.
    pub fn from_raw(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if indptr.len() != rows + 1 || indptr[0] != 0 || *indptr.last().unwrap() != indices.len() {
            return Err(Error::Domain("malformed row offsets".into()));
        }
        if indices.len() != values.len() {
            return Err(Error::Domain("index/value length mismatch".into()));
        }
        for r in 0..rows {
            let row = &indices[indptr[r]..indptr[r + 1]];
            if indptr[r] > indptr[r + 1] || row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Domain(format!("row {r} indices not strictly increasing")));
            }
            if row.iter().any(|&c| c >= cols) {
                return Err(Error::Domain(format!("row {r} has a column out of range")));
            }
        }
        Ok(CsrMatrix { rows, cols, indptr, indices, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `r`.
    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    /// Entry `(r, c)`, zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (r, out) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            *out = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            triplets.extend(cols.iter().zip(vals).map(|(&c, &v)| (c, r, v)));
        }
        CsrMatrix::from_triplets(self.cols, self.rows, triplets)
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut triplets = Vec::new();
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&k, &a) in cols.iter().zip(vals) {
                let (ocols, ovals) = other.row(k);
                triplets.extend(ocols.iter().zip(ovals).map(|(&c, &b)| (r, c, a * b)));
            }
        }
        CsrMatrix::from_triplets(self.rows, other.cols, triplets)
    }

    /// Scales row `r` by `scale[r]`.
    pub fn scale_rows(&self, scale: &[f64]) -> CsrMatrix {
        assert_eq!(scale.len(), self.rows);
        let mut out = self.clone();
        for (r, &s) in scale.iter().enumerate() {
            for v in &mut out.values[self.indptr[r]..self.indptr[r + 1]] {
                *v *= s;
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for (r, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c] = v;
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        (0..self.rows).all(|r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).all(|(&c, &v)| (self.get(c, r) - v).abs() <= tol)
        })
    }

    /// Checks the Laplacian structure: square, symmetric, nonpositive
    /// off-diagonal entries, nonnegative diagonal and zero row sums.
    pub fn check_laplacian(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::Domain("Laplacian must be square".into()));
        }
        let scale = self.max_abs();
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            let mut sum = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                if c == r && v < 0.0 {
                    return Err(Error::Domain(format!("negative diagonal in row {r}")));
                }
                if c != r && v > 0.0 {
                    return Err(Error::Domain(format!("positive off-diagonal entry ({r}, {c})")));
                }
                sum += v;
            }
            // Rounding in the diagonal grows with the row length.
            let tol = 1e-12 * scale * (cols.len().max(1) as f64);
            if sum.abs() > tol {
                return Err(Error::Domain(format!("row {r} sums to {sum:e}, not zero")));
            }
        }
        if !self.is_symmetric(1e-12 * scale) {
            return Err(Error::Domain("Laplacian must be symmetric".into()));
        }
        Ok(())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn mean(a: &[f64]) -> f64 {
    if a.is_empty() {
        0.0
    } else {
        a.iter().sum::<f64>() / a.len() as f64
    }
}

/// Subtracts the mean in place.
pub fn center(a: &mut [f64]) {
    let m = mean(a);
    a.iter_mut().for_each(|x| *x -= m);
}
