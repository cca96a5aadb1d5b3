//! Minimal compressed-row storage for the symmetric matrices of the index form.
//!
//! Matrices are built from triplet lists. Duplicate entries are summed in the
//! order they were pushed, so a caller that pushes `(i, j, v)` and `(j, i, v)`
//! together gets a bitwise symmetric result.

use std::io::Write;

use nalgebra::DMatrix;

#[derive(Debug, Clone, Default)]
pub struct Triplets {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self { n, entries: Vec::with_capacity(cap) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.entries.push((i, j, v));
    }

    /// Push `v` at `(i, j)` and, when off-diagonal, also at `(j, i)`.
    pub fn push_sym(&mut self, i: usize, j: usize, v: f64) {
        self.push(i, j, v);
        if i != j {
            self.push(j, i, v);
        }
    }

    pub fn into_csr(mut self) -> CsrMatrix {
        // stable: equal keys keep push order
        self.entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for &(i, j, v) in &self.entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n: self.n, row_ptr, col_idx, values }
    }
}

/// Square sparse matrix in compressed-row form with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(n: usize) -> Self {
        Triplets::new(n).into_csr()
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut t = Triplets::with_capacity(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            t.push(i, i, v);
        }
        t.into_csr()
    }

    /// Sparse copy of a dense matrix; exact zeros are dropped.
    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        assert_eq!(a.nrows(), a.ncols());
        let mut t = Triplets::new(a.nrows());
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                if a[(i, j)] != 0.0 {
                    t.push(i, j, a[(i, j)]);
                }
            }
        }
        t.into_csr()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        self.diagonal().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| x[i] * self.row(i).map(|(j, v)| v * x[j]).sum::<f64>())
            .sum()
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>())
            .sum()
    }

    /// Bitwise equality with the transpose.
    pub fn is_symmetric(&self) -> bool {
        self.triplets().all(|(i, j, v)| self.get(j, i).to_bits() == v.to_bits())
    }

    /// `Σ_k c_k A_k` over a common dimension.
    pub fn linear_combination(terms: &[(f64, &CsrMatrix)]) -> CsrMatrix {
        let n = terms.first().map(|(_, a)| a.n).unwrap_or(0);
        let cap = terms.iter().map(|(_, a)| a.nnz()).sum();
        let mut t = Triplets::with_capacity(n, cap);
        for (c, a) in terms {
            assert_eq!(a.n, n, "dimension mismatch in linear combination");
            for (i, j, v) in a.triplets() {
                t.push(i, j, c * v);
            }
        }
        t.into_csr()
    }

    /// Principal submatrix on `keep` (in the given order).
    pub fn principal_submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut local = vec![usize::MAX; self.n];
        for (k, &g) in keep.iter().enumerate() {
            local[g] = k;
        }
        let mut t = Triplets::new(keep.len());
        for (k, &g) in keep.iter().enumerate() {
            for (j, v) in self.row(g) {
                if local[j] != usize::MAX {
                    t.push(k, local[j], v);
                }
            }
        }
        t.into_csr()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            a[(i, j)] += v;
        }
        a
    }

    /// Coordinate text: `row col value` per line, 0-based, row-major.
    pub fn write_coo<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, j, v) in self.triplets() {
            writeln!(w, "{i} {j} {v:e}")?;
        }
        Ok(())
    }

    /// Adjacency lists of the off-diagonal pattern.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let mut t = Triplets::new(2);
        t.push(0, 0, 1.0);
        t.push_sym(0, 1, 2.0);
        t.push(0, 0, 0.5);
        let a = t.into_csr();
        assert_eq!(a.get(0, 0), 1.5);
        assert_eq!(a.get(1, 0), 2.0);
        assert_eq!(a.get(1, 1), 0.0);
        assert!(a.is_symmetric());
    }

    #[test]
    fn quad_form_matches_dense() {
        let mut t = Triplets::new(3);
        t.push_sym(0, 1, -1.0);
        t.push_sym(1, 2, 0.25);
        t.push(0, 0, 2.0);
        t.push(2, 2, 3.0);
        let a = t.into_csr();
        let x = [1.0, -2.0, 0.5];
        let d = a.to_dense();
        let xv = nalgebra::DVector::from_column_slice(&x);
        assert!((a.quad_form(&x) - (xv.transpose() * &d * &xv)[(0, 0)]).abs() < 1e-14);
    }

    #[test]
    fn coo_export_is_row_major() {
        let mut t = Triplets::new(2);
        t.push(1, 0, 3.0);
        t.push(0, 1, 2.0);
        let mut buf = Vec::new();
        t.into_csr().write_coo(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1 2e0\n1 0 3e0\n");
    }
}
