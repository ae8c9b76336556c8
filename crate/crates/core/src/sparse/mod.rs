//! Compressed sparse column storage and a direct solver.

mod lu;
mod ordering;

use alloc::vec::Vec;

pub use lu::{LuOptions, SparseLu};
pub use ordering::{nested_dissection, symmetric_pattern};

use crate::mesh::NONE;

/// Coordinate-format accumulator. Duplicates are summed on conversion in
/// insertion order, so the result does not depend on hashing or threads.
#[derive(Debug, Clone, Default)]
pub struct Triplets {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Triplets { nrows, ncols, entries: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Triplets { nrows, ncols, entries: Vec::with_capacity(cap) }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_csc(&self) -> CscMatrix {
        CscMatrix::from_entries(self.nrows, self.ncols, self.entries.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    nrows: usize,
    ncols: usize,
    colptr: Vec<usize>,
    rowind: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CscMatrix {
            nrows,
            ncols,
            colptr: alloc::vec![0; ncols + 1],
            rowind: Vec::new(),
            values: Vec::new(),
        }
    }

    fn from_entries(
        nrows: usize,
        ncols: usize,
        entries: impl Iterator<Item = (usize, usize, f64)> + Clone,
    ) -> Self {
        let mut count = alloc::vec![0usize; ncols + 1];
        for (_, c, _) in entries.clone() {
            count[c + 1] += 1;
        }
        for c in 0..ncols {
            count[c + 1] += count[c];
        }
        let nnz = count[ncols];
        let mut next = count.clone();
        let mut rows = alloc::vec![0usize; nnz];
        let mut vals = alloc::vec![0.0; nnz];
        for (r, c, v) in entries {
            let p = next[c];
            rows[p] = r;
            vals[p] = v;
            next[c] += 1;
        }
        let mut colptr = Vec::with_capacity(ncols + 1);
        let mut rowind = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        let mut perm: Vec<usize> = Vec::new();
        colptr.push(0);
        for c in 0..ncols {
            perm.clear();
            perm.extend(count[c]..count[c + 1]);
            // stable: equal rows keep insertion order
            perm.sort_by_key(|&p| rows[p]);
            let mut last = NONE;
            for &p in &perm {
                if rows[p] == last {
                    *values.last_mut().unwrap() += vals[p];
                } else {
                    rowind.push(rows[p]);
                    values.push(vals[p]);
                    last = rows[p];
                }
            }
            colptr.push(rowind.len());
        }
        CscMatrix { nrows, ncols, colptr, rowind, values }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn colptr(&self) -> &[usize] {
        &self.colptr
    }

    pub fn rowind(&self) -> &[usize] {
        &self.rowind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row indices and values of column `c`.
    pub fn column(&self, c: usize) -> (&[usize], &[f64]) {
        let r = self.colptr[c]..self.colptr[c + 1];
        (&self.rowind[r.clone()], &self.values[r])
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (rows, vals) = self.column(col);
        match rows.binary_search(&row) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = alloc::vec![0.0; self.nrows];
        self.matvec_add(x, &mut y);
        y
    }

    /// `y += A x`.
    pub fn matvec_add(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for c in 0..self.ncols {
            let xc = x[c];
            if xc == 0.0 {
                continue;
            }
            let (rows, vals) = self.column(c);
            for (&r, &v) in rows.iter().zip(vals) {
                y[r] += v * xc;
            }
        }
    }

    /// `y^T A x`.
    pub fn bilinear(&self, y: &[f64], x: &[f64]) -> f64 {
        let ax = self.matvec(x);
        ax.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    pub fn transpose(&self) -> CscMatrix {
        let mut t = Triplets::with_capacity(self.ncols, self.nrows, self.nnz());
        for c in 0..self.ncols {
            let (rows, vals) = self.column(c);
            for (&r, &v) in rows.iter().zip(vals) {
                t.push(c, r, v);
            }
        }
        t.to_csc()
    }

    /// Extracts the submatrix of rows/columns with `map[i] != NONE`,
    /// renumbered through `map`.
    pub fn select(&self, row_map: &[usize], nrows: usize, col_map: &[usize], ncols: usize) -> Self {
        let mut t = Triplets::new(nrows, ncols);
        for c in 0..self.ncols {
            let nc = col_map[c];
            if nc == NONE {
                continue;
            }
            let (rows, vals) = self.column(c);
            for (&r, &v) in rows.iter().zip(vals) {
                let nr = row_map[r];
                if nr != NONE {
                    t.push(nr, nc, v);
                }
            }
        }
        t.to_csc()
    }

    /// Largest absolute entry of each column.
    pub fn column_max(&self) -> Vec<f64> {
        (0..self.ncols)
            .map(|c| self.column(c).1.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = alloc::vec![alloc::vec![0.0; self.ncols]; self.nrows];
        for c in 0..self.ncols {
            let (rows, vals) = self.column(c);
            for (&r, &v) in rows.iter().zip(vals) {
                d[r][c] = v;
            }
        }
        d
    }
}
