//! The mesh-dependent norm
//! `‖V‖_h² = ‖v_f‖²_{1,Ω_f} + ‖q‖²_{Ω_f} + ‖v_p‖²_{div,Ω_p} + ‖ψ‖²_{Ω_p}
//!  + h⁻¹ ‖(v_f − v_p)·n_f‖²_Γ`.

use crate::assembly::element_map;
use crate::geometry::{Mat2, Vec2};
use crate::mesh::{EdgeClass, Region, TwoRegionMesh};
use crate::params::QuadratureConfig;
use crate::quadrature::{make_quadrature, QuadKind};
use crate::solver::DiscreteSolution;
use crate::element::clamp_barycentric;
use crate::{Error, Result};

/// A set of the four fields that can be sampled element by element, either
/// discrete or analytic. `t` is the element, `l` barycentric and `x`
/// physical coordinates of the same point.
pub trait FieldBundle {
    /// Mesh the fields are defined on, `None` for analytic fields.
    fn mesh(&self) -> Option<&TwoRegionMesh> {
        None
    }

    /// Fluid velocity and its Jacobian (row = component).
    fn fluid_velocity(&self, t: usize, l: &[f64; 3], x: Vec2) -> Result<(Vec2, Mat2)>;

    fn pressure(&self, t: usize, l: &[f64; 3], x: Vec2) -> Result<f64>;

    /// Darcy velocity and its divergence.
    fn darcy_velocity(&self, t: usize, l: &[f64; 3], x: Vec2) -> Result<(Vec2, f64)>;

    fn head(&self, t: usize, l: &[f64; 3], x: Vec2) -> Result<f64>;
}

impl FieldBundle for DiscreteSolution<'_> {
    fn mesh(&self) -> Option<&TwoRegionMesh> {
        Some(DiscreteSolution::mesh(self))
    }

    fn fluid_velocity(&self, t: usize, l: &[f64; 3], _x: Vec2) -> Result<(Vec2, Mat2)> {
        DiscreteSolution::fluid_velocity(self, t, l)
    }

    fn pressure(&self, t: usize, l: &[f64; 3], _x: Vec2) -> Result<f64> {
        DiscreteSolution::pressure(self, t, l)
    }

    fn darcy_velocity(&self, t: usize, l: &[f64; 3], _x: Vec2) -> Result<(Vec2, f64)> {
        DiscreteSolution::darcy_velocity(self, t, l)
    }

    fn head(&self, t: usize, _l: &[f64; 3], _x: Vec2) -> Result<f64> {
        DiscreteSolution::head(self, t)
    }
}

/// Squared contributions of `‖a − b‖_h` and the total.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HNorm {
    /// `‖·‖²_{1,Ω_f}` of the fluid velocity (L² plus gradient).
    pub fluid_velocity: f64,
    pub pressure: f64,
    /// `‖·‖²_{div,Ω_p}` of the Darcy velocity.
    pub darcy_velocity: f64,
    pub head: f64,
    /// `h⁻¹ ‖(·_f − ·_p)·n_f‖²_Γ`.
    pub interface: f64,
    /// Square root of the sum of the five contributions.
    pub total: f64,
}

impl HNorm {
    pub fn parts(&self) -> [f64; 5] {
        [self.fluid_velocity, self.pressure, self.darcy_velocity, self.head, self.interface]
    }
}

/// Computes `‖a − b‖_h` on `mesh` with the data quadrature degree.
pub fn compute_h_norm(
    mesh: &TwoRegionMesh,
    a: &dyn FieldBundle,
    b: &dyn FieldBundle,
    quad: &QuadratureConfig,
) -> Result<HNorm> {
    for side in [a.mesh(), b.mesh()].into_iter().flatten() {
        if !(core::ptr::eq(side, mesh) || side == mesh) {
            return Err(Error::MeshMismatch);
        }
    }
    let tri = make_quadrature(QuadKind::Triangle, quad.data)?;
    let edge = make_quadrature(QuadKind::Edge, quad.data)?;
    let mut n = HNorm::default();
    for t in 0..mesh.num_triangles() {
        let map = element_map(mesh, t)?;
        let area = map.area();
        for (l, w) in tri.iter() {
            let x = map.to_physical(l);
            let wa = w * area;
            match mesh.region(t) {
                Region::Fluid => {
                    let (ua, ga) = a.fluid_velocity(t, l, x)?;
                    let (ub, gb) = b.fluid_velocity(t, l, x)?;
                    let (du, dg) = (ua - ub, ga - gb);
                    n.fluid_velocity += wa * (du.dot(du) + dg.ddot(&dg));
                    let dp = a.pressure(t, l, x)? - b.pressure(t, l, x)?;
                    n.pressure += wa * dp * dp;
                }
                Region::Porous => {
                    let (ua, da) = a.darcy_velocity(t, l, x)?;
                    let (ub, db) = b.darcy_velocity(t, l, x)?;
                    let du = ua - ub;
                    n.darcy_velocity += wa * (du.dot(du) + (da - db) * (da - db));
                    let dh = a.head(t, l, x)? - b.head(t, l, x)?;
                    n.head += wa * dh * dh;
                }
            }
        }
    }
    let inv_h = 1.0 / mesh.h();
    for e in mesh.edges_of_class(EdgeClass::Interface) {
        let [tf, tp] = mesh.edge_triangles(e);
        let mf = element_map(mesh, tf)?;
        let mp = element_map(mesh, tp)?;
        let [va, vb] = mesh.edge(e);
        let (xa, xb) = (mesh.vertex(va), mesh.vertex(vb));
        let nf = mesh.edge_normal(e);
        let len = mesh.edge_length(e);
        for qp in 0..edge.len() {
            let s = edge.param(qp);
            let x = xa * (1.0 - s) + xb * s;
            let lf = clamp_barycentric(mf.to_barycentric(x));
            let lp = clamp_barycentric(mp.to_barycentric(x));
            let jump = |f: &dyn FieldBundle| -> Result<f64> {
                Ok((f.fluid_velocity(tf, &lf, x)?.0 - f.darcy_velocity(tp, &lp, x)?.0).dot(nf))
            };
            let d = jump(a)? - jump(b)?;
            n.interface += edge.weights[qp] * len * inv_h * d * d;
        }
    }
    n.total = libm::sqrt(n.parts().iter().sum());
    Ok(n)
}

/// The identically zero bundle.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroFields;

impl FieldBundle for ZeroFields {
    fn fluid_velocity(&self, _t: usize, _l: &[f64; 3], _x: Vec2) -> Result<(Vec2, Mat2)> {
        Ok((Vec2::ZERO, Mat2::ZERO))
    }

    fn pressure(&self, _t: usize, _l: &[f64; 3], _x: Vec2) -> Result<f64> {
        Ok(0.0)
    }

    fn darcy_velocity(&self, _t: usize, _l: &[f64; 3], _x: Vec2) -> Result<(Vec2, f64)> {
        Ok((Vec2::ZERO, 0.0))
    }

    fn head(&self, _t: usize, _l: &[f64; 3], _x: Vec2) -> Result<f64> {
        Ok(0.0)
    }
}
