//! Reference-element bases (P1, cubic bubble, BDM1) and the affine element
//! map used to push them to physical triangles.
//!
//! Reference triangle: p₀ = (0,0), p₁ = (1,0), p₂ = (0,1), with reference
//! coordinates (x̂, ŷ) = (λ₁, λ₂). BDM1 degrees of freedom on local edge `i`
//! (opposite pᵢ, traversed p_{i+1} → p_{i+2}) are the moments
//! `∫_e v·n q_k ds` with outward unit normal `n`, `q₀ = 1` and
//! `q₁(s) = √3 (2s − 1)`; DOF index `2i + k`.

use alloc::vec::Vec;

use crate::dense;
use crate::geometry::{Mat2, Vec2};
use crate::quadrature::{make_quadrature, QuadKind};
use crate::{Error, Result};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Reference vertex coordinates.
pub const REF_VERTICES: [Vec2; 3] = [Vec2([0.0, 0.0]), Vec2([1.0, 0.0]), Vec2([0.0, 1.0])];

/// Gradients of λ₀, λ₁, λ₂ in reference coordinates.
pub const REF_GRAD_LAMBDA: [Vec2; 3] = [Vec2([-1.0, -1.0]), Vec2([1.0, 0.0]), Vec2([0.0, 1.0])];

/// Edge moment weight `q_k` at arc-length parameter `s`.
#[inline]
pub fn edge_moment_weight(k: usize, s: f64) -> f64 {
    if k == 0 {
        1.0
    } else {
        SQRT3 * (2.0 * s - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    P1,
    Bubble,
    Bdm1,
}

/// Basis of one reference element family. BDM1 carries the coefficients of
/// its six basis functions in the monomial basis
/// `(1,0), (x̂,0), (ŷ,0), (0,1), (0,x̂), (0,ŷ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceBasis {
    family: Family,
    bdm_coeffs: [[f64; 6]; 6],
}

/// Values and first derivatives at a set of reference points, indexed
/// `point * num_basis + basis`. Scalar families store the value in the first
/// component and the gradient in the first row of `derivatives`; BDM1 stores
/// the reference Jacobian (row = component).
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTable {
    pub family: Family,
    pub num_points: usize,
    pub num_basis: usize,
    pub values: Vec<Vec2>,
    pub derivatives: Vec<Mat2>,
}

impl BasisTable {
    pub fn value(&self, point: usize, basis: usize) -> Vec2 {
        self.values[point * self.num_basis + basis]
    }

    pub fn derivative(&self, point: usize, basis: usize) -> Mat2 {
        self.derivatives[point * self.num_basis + basis]
    }
}

fn monomials(x: Vec2) -> [Vec2; 6] {
    [
        Vec2::new(1.0, 0.0),
        Vec2::new(x.x(), 0.0),
        Vec2::new(x.y(), 0.0),
        Vec2::new(0.0, 1.0),
        Vec2::new(0.0, x.x()),
        Vec2::new(0.0, x.y()),
    ]
}

/// Reference edge `i`: start point, end point.
pub fn ref_edge(i: usize) -> (Vec2, Vec2) {
    (REF_VERTICES[(i + 1) % 3], REF_VERTICES[(i + 2) % 3])
}

impl ReferenceBasis {
    pub fn p1() -> Self {
        ReferenceBasis { family: Family::P1, bdm_coeffs: [[0.0; 6]; 6] }
    }

    pub fn bubble() -> Self {
        ReferenceBasis { family: Family::Bubble, bdm_coeffs: [[0.0; 6]; 6] }
    }

    pub fn bdm1() -> Self {
        // moment matrix D[dof][monomial]; basis coefficients C = D⁻¹
        let q = make_quadrature(QuadKind::Edge, 4).expect("edge rule");
        let mut d = [[0.0; 6]; 6];
        for i in 0..3 {
            let (a, b) = ref_edge(i);
            let t = b - a;
            let len = t.norm();
            let n = t.rot_cw() * (1.0 / len);
            for (p, w) in q.iter() {
                let s = p[1];
                let x = a + t * s;
                let m = monomials(x);
                for k in 0..2 {
                    let wk = w * len * edge_moment_weight(k, s);
                    for (c, mono) in m.iter().enumerate() {
                        d[2 * i + k][c] += wk * mono.dot(n);
                    }
                }
            }
        }
        let inv = dense::inverse(&d).expect("BDM1 moment matrix is invertible");
        ReferenceBasis { family: Family::Bdm1, bdm_coeffs: inv }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        match self.family {
            Family::P1 => 3,
            Family::Bubble => 1,
            Family::Bdm1 => 6,
        }
    }

    /// BDM1 basis function `j` at reference point `x`.
    #[inline]
    pub fn bdm_value(&self, j: usize, x: Vec2) -> Vec2 {
        let c = &self.bdm_coeffs;
        Vec2::new(
            c[0][j] + c[1][j] * x.x() + c[2][j] * x.y(),
            c[3][j] + c[4][j] * x.x() + c[5][j] * x.y(),
        )
    }

    /// Reference Jacobian of BDM1 basis function `j` (constant).
    #[inline]
    pub fn bdm_jacobian(&self, j: usize) -> Mat2 {
        let c = &self.bdm_coeffs;
        Mat2([[c[1][j], c[2][j]], [c[4][j], c[5][j]]])
    }

    /// Reference divergence of BDM1 basis function `j` (constant).
    #[inline]
    pub fn bdm_divergence(&self, j: usize) -> f64 {
        self.bdm_coeffs[1][j] + self.bdm_coeffs[5][j]
    }

    /// Tabulates values and derivatives; points are barycentric.
    pub fn eval_basis(&self, points: &[[f64; 3]]) -> Result<BasisTable> {
        for p in points {
            let sum = p[0] + p[1] + p[2];
            if p.iter().any(|&l| l < -1e-12 || !l.is_finite()) || libm::fabs(sum - 1.0) > 1e-12 {
                return Err(Error::PointOutsideReference);
            }
        }
        let nb = self.dim();
        let mut values = Vec::with_capacity(points.len() * nb);
        let mut derivatives = Vec::with_capacity(points.len() * nb);
        for p in points {
            match self.family {
                Family::P1 => {
                    for i in 0..3 {
                        values.push(Vec2::new(p[i], 0.0));
                        let g = REF_GRAD_LAMBDA[i];
                        derivatives.push(Mat2([[g.x(), g.y()], [0.0, 0.0]]));
                    }
                }
                Family::Bubble => {
                    values.push(Vec2::new(bubble_value(p), 0.0));
                    let g = bubble_gradient(p, &REF_GRAD_LAMBDA);
                    derivatives.push(Mat2([[g.x(), g.y()], [0.0, 0.0]]));
                }
                Family::Bdm1 => {
                    let x = Vec2::new(p[1], p[2]);
                    for j in 0..6 {
                        values.push(self.bdm_value(j, x));
                        derivatives.push(self.bdm_jacobian(j));
                    }
                }
            }
        }
        Ok(BasisTable {
            family: self.family,
            num_points: points.len(),
            num_basis: nb,
            values,
            derivatives,
        })
    }
}

/// b_K = 27 λ₀λ₁λ₂ (maximum 1 at the barycentre).
#[inline]
pub fn bubble_value(l: &[f64; 3]) -> f64 {
    27.0 * l[0] * l[1] * l[2]
}

/// ∇b_K given the gradients of the barycentric coordinates.
#[inline]
pub fn bubble_gradient(l: &[f64; 3], g: &[Vec2; 3]) -> Vec2 {
    (g[0] * (l[1] * l[2]) + g[1] * (l[0] * l[2]) + g[2] * (l[0] * l[1])) * 27.0
}

/// Hessian of b_K (linear in λ).
pub fn bubble_hessian(l: &[f64; 3], g: &[Vec2; 3]) -> Mat2 {
    let outer_sym = |a: Vec2, b: Vec2| {
        Mat2([
            [2.0 * a.x() * b.x(), a.x() * b.y() + a.y() * b.x()],
            [a.x() * b.y() + a.y() * b.x(), 2.0 * a.y() * b.y()],
        ])
    };
    (outer_sym(g[0], g[1]).scale(l[2])
        + outer_sym(g[0], g[2]).scale(l[1])
        + outer_sym(g[1], g[2]).scale(l[0]))
    .scale(27.0)
}

/// Affine map x = x₀ + J x̂ of a physical triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMap {
    pub coords: [Vec2; 3],
    pub jac: Mat2,
    pub jac_inv: Mat2,
    pub det: f64,
    /// Physical gradients of λ₀, λ₁, λ₂.
    pub grad_lambda: [Vec2; 3],
}

impl ElementMap {
    pub fn new(coords: [Vec2; 3]) -> Self {
        let jac = Mat2::from_cols(coords[1] - coords[0], coords[2] - coords[0]);
        let det = jac.det();
        let jac_inv = jac.inverse();
        let jt = jac_inv.transpose();
        let grad_lambda = REF_GRAD_LAMBDA.map(|g| jt.mul_vec(g));
        ElementMap { coords, jac, jac_inv, det, grad_lambda }
    }

    pub fn area(&self) -> f64 {
        0.5 * libm::fabs(self.det)
    }

    pub fn to_physical(&self, l: &[f64; 3]) -> Vec2 {
        self.coords[0] * l[0] + self.coords[1] * l[1] + self.coords[2] * l[2]
    }

    /// Barycentric coordinates of a physical point.
    pub fn to_barycentric(&self, x: Vec2) -> [f64; 3] {
        let r = self.jac_inv.mul_vec(x - self.coords[0]);
        [1.0 - r.x() - r.y(), r.x(), r.y()]
    }

    /// Contravariant Piola transform of a reference vector.
    #[inline]
    pub fn piola(&self, v: Vec2) -> Vec2 {
        self.jac.mul_vec(v) * (1.0 / self.det)
    }

    /// Physical Jacobian of a Piola-mapped field with reference Jacobian `dv`.
    #[inline]
    pub fn piola_jacobian(&self, dv: &Mat2) -> Mat2 {
        self.jac.mul_mat(dv).mul_mat(&self.jac_inv).scale(1.0 / self.det)
    }
}
