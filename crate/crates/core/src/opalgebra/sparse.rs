//! Compressed sparse row matrices over `Complex64`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CsrMatrix { rows, cols, indptr: vec![0; rows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let n = d.len();
        CsrMatrix { rows: n, cols: n, indptr: (0..=n).collect(), indices: (0..n).collect(), values: d.to_vec() }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed, exact zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut t: Vec<(usize, usize, Complex64)>) -> Self {
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0; rows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            assert!(r < rows && c < cols, "triplet out of range");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix { rows, cols, indptr, indices, values }.pruned()
    }

    fn pruned(self) -> Self {
        let mut t = Vec::with_capacity(self.values.len());
        let mut indptr = vec![0; self.rows + 1];
        let mut indices = Vec::with_capacity(self.values.len());
        for r in 0..self.rows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k] != ZERO {
                    indices.push(self.indices[k]);
                    t.push(self.values[k]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        CsrMatrix { rows: self.rows, cols: self.cols, indptr, indices, values: t }
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

    /// Iterates `(row, col, value)` over stored entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.rows).flat_map(move |r| (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.values[k])))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        (self.indptr[r]..self.indptr[r + 1]).find(|&k| self.indices[k] == c).map(|k| self.values[k]).unwrap_or(ZERO)
    }

    pub fn to_triplets(&self) -> Vec<(usize, usize, Complex64)> {
        self.entries().collect()
    }

    pub fn adjoint(&self) -> Self {
        let t = self.entries().map(|(r, c, v)| (c, r, v.conj())).collect();
        CsrMatrix::from_triplets(self.cols, self.rows, t)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= s;
        }
        out.pruned()
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: Complex64, other: &CsrMatrix, b: Complex64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut t: Vec<_> = self.entries().map(|(r, c, v)| (r, c, a * v)).collect();
        t.extend(other.entries().map(|(r, c, v)| (r, c, b * v)));
        CsrMatrix::from_triplets(self.rows, self.cols, t)
    }

    pub fn add(&self, other: &CsrMatrix) -> Self {
        let one = Complex64::new(1.0, 0.0);
        self.axpby(one, other, one)
    }

    pub fn sub(&self, other: &CsrMatrix) -> Self {
        self.axpby(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut acc = vec![ZERO; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; other.cols];
        let mut indptr = vec![0; self.rows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.rows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                let (m, a) = (self.indices[k], self.values[k]);
                for kk in other.indptr[m]..other.indptr[m + 1] {
                    let c = other.indices[kk];
                    if !mark[c] {
                        mark[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * other.values[kk];
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if acc[c] != ZERO {
                    indices.push(c);
                    values.push(acc[c]);
                }
                acc[c] = ZERO;
                mark[c] = false;
            }
            touched.clear();
            indptr[r + 1] = indices.len();
        }
        CsrMatrix { rows: self.rows, cols: other.cols, indptr, indices, values }
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &CsrMatrix) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn kron(&self, other: &CsrMatrix) -> Self {
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.entries() {
            for (r2, c2, v2) in other.entries() {
                t.push((r1 * other.rows + r2, c1 * other.cols + c2, v1 * v2));
            }
        }
        CsrMatrix::from_triplets(self.rows * other.rows, self.cols * other.cols, t)
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| (self.indptr[r]..self.indptr[r + 1]).map(|k| self.values[k] * x[self.indices[k]]).sum())
            .collect()
    }

    /// `⟨x|self|x⟩`.
    pub fn expectation(&self, x: &[Complex64]) -> Complex64 {
        let y = self.apply(x);
        x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum()
    }

    /// Largest `|self − self†|` entry.
    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dense(m: &CsrMatrix) -> Vec<Vec<Complex64>> {
        let mut d = vec![vec![ZERO; m.cols()]; m.rows()];
        for (r, cc, v) in m.entries() {
            d[r][cc] = v;
        }
        d
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 1.0)), (1, 0, c(1.0, 0.0)), (1, 0, c(-1.0, 0.0))]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0, 1.0));
    }

    #[test]
    fn matmul_matches_dense() {
        let a = CsrMatrix::from_triplets(2, 3, vec![(0, 0, c(1.0, 1.0)), (0, 2, c(2.0, 0.0)), (1, 1, c(0.0, -1.0))]);
        let b = CsrMatrix::from_triplets(3, 2, vec![(0, 1, c(3.0, 0.0)), (1, 0, c(1.0, 2.0)), (2, 0, c(-1.0, 0.0)), (2, 1, c(0.5, 0.5))]);
        let p = dense(&a.matmul(&b));
        let (da, db) = (dense(&a), dense(&b));
        for i in 0..2 {
            for j in 0..2 {
                let e: Complex64 = (0..3).map(|k| da[i][k] * db[k][j]).sum();
                assert!((p[i][j] - e).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn kron_layout() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 1, c(2.0, 0.0))]);
        let b = CsrMatrix::identity(3);
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (6, 6));
        for i in 0..3 {
            assert_eq!(k.get(i, 3 + i), c(2.0, 0.0));
        }
        assert_eq!(k.nnz(), 3);
    }

    #[test]
    fn adjoint_and_hermiticity() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0, 2.0)), (1, 0, c(1.0, -2.0)), (0, 0, c(3.0, 0.0))]);
        assert_eq!(a.hermiticity_defect(), 0.0);
        let b = CsrMatrix::from_triplets(2, 2, vec![(0, 1, c(0.0, 1.0))]);
        assert_eq!(b.adjoint().get(1, 0), c(0.0, -1.0));
        assert!(b.hermiticity_defect() > 0.9);
    }

    #[test]
    fn commutator_trace_vanishes() {
        let a = CsrMatrix::from_triplets(3, 3, vec![(0, 1, c(1.0, 0.0)), (1, 2, c(2.0, 1.0)), (2, 0, c(0.3, 0.0))]);
        let b = CsrMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(5.0, 0.0)]);
        assert!(a.commutator(&b).trace().norm() < 1e-15);
    }
}
