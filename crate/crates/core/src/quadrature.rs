//! Gauss–Legendre edge rules and collapsed (Duffy) Gauss rules on triangles.
//!
//! Triangle weights are normalized to sum to one, so `∫_K f ≈ |K| Σ wᵢ f(xᵢ)`;
//! edge weights likewise sum to one and `∫_E f ≈ |E| Σ wᵢ f(xᵢ)`.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Highest polynomial exactness offered by [`make_quadrature`].
pub const MAX_DEGREE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadKind {
    Triangle,
    Edge,
}

/// Points are barycentric. Triangle points are `[λ₀, λ₁, λ₂]`; edge points are
/// `[1 − s, s, 0]` for the arc-length parameter `s ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: QuadKind,
    pub degree: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Edge parameter of point `i` (edge rules only).
    pub fn param(&self, i: usize) -> f64 {
        self.points[i][1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 3], f64)> + '_ {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

pub fn make_quadrature(kind: QuadKind, degree: usize) -> Result<QuadratureRule> {
    if degree > MAX_DEGREE {
        return Err(Error::UnsupportedQuadrature { degree });
    }
    Ok(match kind {
        QuadKind::Edge => {
            let n = (degree + 2) / 2;
            let (x, w) = gauss_legendre_unit(n);
            QuadratureRule {
                kind,
                degree,
                points: x.iter().map(|&s| [1.0 - s, s, 0.0]).collect(),
                weights: w,
            }
        }
        QuadKind::Triangle => {
            // The collapsed direction carries an extra (1 − u) factor.
            let n = (degree + 3) / 2;
            let (x, w) = gauss_legendre_unit(n);
            let mut points = Vec::with_capacity(n * n);
            let mut weights = Vec::with_capacity(n * n);
            for (&u, &wu) in x.iter().zip(&w) {
                for (&v, &wv) in x.iter().zip(&w) {
                    let l1 = u;
                    let l2 = v * (1.0 - u);
                    points.push([1.0 - l1 - l2, l1, l2]);
                    weights.push(2.0 * wu * wv * (1.0 - u));
                }
            }
            QuadratureRule { kind, degree, points, weights }
        }
    })
}

/// `n`-point Gauss–Legendre nodes and weights on `[0, 1]` (weights sum to 1).
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if libm::fabs(dx) < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push(0.5 * (1.0 - x));
        weights.push(0.5 * w);
    }
    // ascending order in [0, 1]
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
