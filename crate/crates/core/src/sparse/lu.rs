//! Left-looking sparse LU with partial pivoting (Gilbert–Peierls).
//!
//! Columns are processed in a caller-supplied order `q`; each column of
//! `L` and `U` comes from a sparse triangular solve whose nonzero pattern is
//! found by depth-first search in the graph of the partial `L`.

use alloc::vec::Vec;

use super::CscMatrix;
use crate::mesh::NONE;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuOptions {
    /// Keep the diagonal entry as pivot when it is at least this fraction of
    /// the largest candidate.
    pub diagonal_preference: f64,
    /// A pivot at most `singular_tolerance` times the largest entry of the
    /// original column declares the matrix singular.
    pub singular_tolerance: f64,
}

impl Default for LuOptions {
    fn default() -> Self {
        LuOptions { diagonal_preference: 1e-3, singular_tolerance: 1e-12 }
    }
}

/// Factors `P A Q = L U`, `L` unit lower triangular.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    // L: unit diagonal stored first in each column, rows in pivot order
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    // U: diagonal stored last in each column
    up: Vec<usize>,
    ui: Vec<usize>,
    ux: Vec<f64>,
    pinv: Vec<usize>,
    q: Vec<usize>,
}

impl SparseLu {
    /// Factors `a` with column order `q`. On a zero pivot returns the
    /// original column index that failed.
    pub fn factor(a: &CscMatrix, q: &[usize], opts: &LuOptions) -> Result<Self, usize> {
        let n = a.ncols();
        assert_eq!(a.nrows(), n, "LU needs a square matrix");
        assert_eq!(q.len(), n);
        let colmax = a.column_max();

        let mut lp: Vec<usize> = Vec::with_capacity(n + 1);
        let mut li: Vec<usize> = Vec::with_capacity(4 * a.nnz());
        let mut lx: Vec<f64> = Vec::with_capacity(4 * a.nnz());
        let mut up = Vec::with_capacity(n + 1);
        let mut ui = Vec::with_capacity(4 * a.nnz());
        let mut ux = Vec::with_capacity(4 * a.nnz());
        let mut pinv = alloc::vec![NONE; n];
        let mut x = alloc::vec![0.0; n];
        let mut xi = alloc::vec![0usize; n];
        let mut marked = alloc::vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut pstack: Vec<usize> = Vec::new();

        for (k, &col) in q.iter().enumerate() {
            lp.push(li.len());
            up.push(ui.len());

            // reach: xi[top..n] in topological order
            let mut top = n;
            let (arows, avals) = a.column(col);
            for &r in arows {
                if marked[r] {
                    continue;
                }
                stack.clear();
                pstack.clear();
                stack.push(r);
                pstack.push(NONE);
                while let Some(&j) = stack.last() {
                    let head = stack.len() - 1;
                    let jcol = pinv[j];
                    if !marked[j] {
                        marked[j] = true;
                        pstack[head] = if jcol == NONE { 0 } else { lp[jcol] };
                    }
                    let end = if jcol == NONE { 0 } else { lp_end(&lp, jcol, li.len()) };
                    let mut pushed = false;
                    let mut p = pstack[head];
                    while p < end {
                        let i = li[p];
                        p += 1;
                        if !marked[i] {
                            pstack[head] = p;
                            stack.push(i);
                            pstack.push(NONE);
                            pushed = true;
                            break;
                        }
                    }
                    if !pushed {
                        stack.pop();
                        pstack.pop();
                        top -= 1;
                        xi[top] = j;
                    }
                }
            }
            for &j in &xi[top..] {
                marked[j] = false;
                x[j] = 0.0;
            }
            for (&r, &v) in arows.iter().zip(avals) {
                x[r] = v;
            }
            // sparse forward substitution with the unit L
            for px in top..n {
                let j = xi[px];
                let jcol = pinv[j];
                if jcol == NONE {
                    continue;
                }
                let xj = x[j];
                if xj == 0.0 {
                    continue;
                }
                for p in lp[jcol] + 1..lp_end(&lp, jcol, li.len()) {
                    x[li[p]] -= lx[p] * xj;
                }
            }

            let mut ipiv = NONE;
            let mut amax = -1.0;
            for &i in &xi[top..] {
                if pinv[i] == NONE {
                    if x[i].abs() > amax {
                        amax = x[i].abs();
                        ipiv = i;
                    }
                } else {
                    ui.push(pinv[i]);
                    ux.push(x[i]);
                }
            }
            if ipiv == NONE || amax <= opts.singular_tolerance * colmax[col] || amax == 0.0 {
                return Err(col);
            }
            if pinv[col] == NONE && x[col].abs() >= opts.diagonal_preference * amax {
                ipiv = col;
            }
            let pivot = x[ipiv];
            ui.push(k);
            ux.push(pivot);
            pinv[ipiv] = k;
            li.push(ipiv);
            lx.push(1.0);
            for &i in &xi[top..] {
                if pinv[i] == NONE {
                    li.push(i);
                    lx.push(x[i] / pivot);
                }
                x[i] = 0.0;
            }
        }
        lp.push(li.len());
        up.push(ui.len());
        for r in &mut li {
            *r = pinv[*r];
        }
        Ok(SparseLu { n, lp, li, lx, up, ui, ux, pinv, q: q.to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Nonzeros in `L + U`.
    pub fn nnz(&self) -> usize {
        self.lx.len() + self.ux.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut y = alloc::vec![0.0; self.n];
        for i in 0..self.n {
            y[self.pinv[i]] = b[i];
        }
        for j in 0..self.n {
            let yj = y[j];
            if yj == 0.0 {
                continue;
            }
            for p in self.lp[j] + 1..self.lp[j + 1] {
                y[self.li[p]] -= self.lx[p] * yj;
            }
        }
        for j in (0..self.n).rev() {
            let d = self.up[j + 1] - 1;
            y[j] /= self.ux[d];
            let yj = y[j];
            if yj == 0.0 {
                continue;
            }
            for p in self.up[j]..d {
                y[self.ui[p]] -= self.ux[p] * yj;
            }
        }
        let mut x = alloc::vec![0.0; self.n];
        for k in 0..self.n {
            x[self.q[k]] = y[k];
        }
        x
    }
}

#[inline]
fn lp_end(lp: &[usize], col: usize, len: usize) -> usize {
    if col + 1 < lp.len() {
        lp[col + 1]
    } else {
        len
    }
}
