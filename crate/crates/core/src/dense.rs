//! Tiny dense solves for element-level systems (basis construction, local
//! projections). Row-major, partial pivoting.

use alloc::vec::Vec;

/// Solves `A X = B` in place for `N×N` `a` and `N×M` right-hand sides.
/// Returns `None` when `a` is singular to working precision.
pub fn solve_in_place<const N: usize, const M: usize>(
    a: &mut [[f64; N]; N],
    b: &mut [[f64; M]; N],
) -> Option<()> {
    for k in 0..N {
        let mut piv = k;
        let mut best = libm::fabs(a[k][k]);
        for (i, row) in a.iter().enumerate().skip(k + 1) {
            let v = libm::fabs(row[k]);
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..N {
            let f = a[i][k] / a[k][k];
            if f == 0.0 {
                continue;
            }
            for j in k..N {
                a[i][j] -= f * a[k][j];
            }
            for j in 0..M {
                b[i][j] -= f * b[k][j];
            }
        }
    }
    for k in (0..N).rev() {
        for j in 0..M {
            let mut s = b[k][j];
            for i in k + 1..N {
                s -= a[k][i] * b[i][j];
            }
            b[k][j] = s / a[k][k];
        }
    }
    Some(())
}

/// Inverse of an `N×N` matrix.
pub fn inverse<const N: usize>(a: &[[f64; N]; N]) -> Option<[[f64; N]; N]> {
    let mut m = *a;
    let mut id = [[0.0; N]; N];
    for (i, row) in id.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    solve_in_place(&mut m, &mut id)?;
    Some(id)
}

/// Dense row-major matrix used by diagnostics (inf-sup checks, small tests).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: alloc::vec![0.0; rows * cols] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }
}
