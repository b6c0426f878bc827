//! Minimal CSR (compressed sparse row) matrix with the handful of kernels
//! the rest of the crate needs: row iteration, mat-vec, and sparse × dense.

use nalgebra::DMatrix;

/// Sparse f64 matrix in CSR form. Column indices are sorted within each row
/// and duplicates are merged at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,  // len = n_rows + 1
    indices: Vec<usize>, // len = nnz
    values: Vec<f64>,    // len = nnz
}

impl Csr {
    /// Build from (row, col, value) triplets. Duplicate coordinates sum.
    /// Zero values are kept if present in the input; callers filter first
    /// when they want structural nonzeros only.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; n_rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n_rows && c < n_cols, "triplet index out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n_rows {
            indptr[i + 1] += indptr[i];
        }
        Csr {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
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

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[s..e], &self.values[s..e])
    }

    /// Stored value at (i, j), or 0.0 when the coordinate is not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Position of entry (i, j) in the flat CSR arrays, if stored.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (s, e) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[s..e].binary_search(&j).ok().map(|k| s + k)
    }

    /// Row index owning flat position `pos`.
    pub fn row_of_position(&self, pos: usize) -> usize {
        debug_assert!(pos < self.nnz());
        // indptr is non-decreasing; find the row whose range contains pos
        match self.indptr.binary_search(&pos) {
            Ok(mut r) => {
                // skip empty rows that share the same offset
                while r + 1 < self.indptr.len() && self.indptr[r + 1] == pos {
                    r += 1;
                }
                r
            }
            Err(ins) => ins - 1,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| self.row(i).1.iter().sum())
            .collect()
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n_cols);
        let mut y = vec![0.0; self.n_rows];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[i] = acc;
        }
        y
    }

    /// C = A · B with dense B.
    pub fn mul_dense(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(self.n_cols, b.nrows(), "dimension mismatch in sparse-dense product");
        let m = b.ncols();
        let mut c = DMatrix::<f64>::zeros(self.n_rows, m);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&k, &v) in cols.iter().zip(vals) {
                for j in 0..m {
                    c[(i, j)] += v * b[(k, j)];
                }
            }
        }
        c
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::<f64>::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                d[(i, c)] += v;
            }
        }
        d
    }

    /// New matrix with every stored value transformed by `f(row, col, value)`.
    pub fn map_values(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Csr {
        let mut out = self.clone();
        for i in 0..self.n_rows {
            let (s, e) = (self.indptr[i], self.indptr[i + 1]);
            for k in s..e {
                out.values[k] = f(i, self.indices[k], self.values[k]);
            }
        }
        out
    }

    /// Scale the whole matrix by a scalar.
    pub fn scaled(&self, s: f64) -> Csr {
        self.map_values(|_, _, v| v * s)
    }

    /// Max |A_ij - A_ji| over stored entries; 0 for a symmetric matrix.
    pub fn symmetry_gap(&self) -> f64 {
        assert_eq!(self.n_rows, self.n_cols);
        let mut gap: f64 = 0.0;
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                gap = gap.max((v - self.get(j, i)).abs());
            }
        }
        gap
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_merge_duplicates_and_sort() {
        let m = Csr::from_triplets(2, 3, vec![(1, 2, 1.0), (0, 1, 2.0), (1, 2, 0.5), (1, 0, 3.0)]);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.row(0), (&[1usize][..], &[2.0][..]));
        assert_eq!(m.row(1), (&[0usize, 2][..], &[3.0, 1.5][..]));
        assert_eq!(m.get(1, 1), 0.0);
    }

    #[test]
    fn row_of_position_handles_empty_rows() {
        let m = Csr::from_triplets(4, 4, vec![(0, 1, 1.0), (2, 0, 1.0), (2, 3, 1.0), (3, 3, 1.0)]);
        assert_eq!(m.row_of_position(0), 0);
        assert_eq!(m.row_of_position(1), 2);
        assert_eq!(m.row_of_position(2), 2);
        assert_eq!(m.row_of_position(3), 3);
    }

    #[test]
    fn mat_vec_and_dense_agree() {
        let m = Csr::from_triplets(3, 3, vec![(0, 1, 2.0), (1, 0, 2.0), (1, 2, 1.0), (2, 1, 1.0)]);
        let x = vec![1.0, 2.0, 3.0];
        let y = m.mul_vec(&x);
        let yd = m.to_dense() * nalgebra::DVector::from_vec(x);
        for i in 0..3 {
            assert!((y[i] - yd[i]).abs() < 1e-15);
        }
        assert_eq!(m.symmetry_gap(), 0.0);
    }
}
