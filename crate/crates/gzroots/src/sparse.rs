//! Coordinate-format complex matrices with deterministic entry order.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Square sparse matrix keyed by `(row, col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stores `value` at `(row, col)`; exact zeros are not stored.
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(row < self.dim && col < self.dim, "entry ({row}, {col}) out of range");
        if value == Complex64::new(0.0, 0.0) {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries
            .get(&(row, col))
            .copied()
            .unwrap_or_default()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    /// Nonzero entries of column `col`, as `(row, value)`.
    pub fn column(&self, col: usize) -> Vec<(usize, Complex64)> {
        self.iter()
            .filter(|&(_, c, _)| c == col)
            .map(|(r, _, v)| (r, v))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|(&(r, c), &v)| ((c, r), v)).collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.entries.values().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_and_transpose() {
        let mut m = SparseMatrix::zeros(3);
        m.set(0, 2, Complex64::new(1.0, -2.0));
        m.set(1, 1, Complex64::new(0.0, 0.0));
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.transpose().get(2, 0), Complex64::new(1.0, -2.0));
        assert_eq!(m.column(2), vec![(0, Complex64::new(1.0, -2.0))]);
        let d = m.to_dense();
        assert_eq!(d[(0, 2)], Complex64::new(1.0, -2.0));
        m.set(0, 2, Complex64::new(0.0, 0.0));
        assert_eq!(m.nnz(), 0);
    }
}
