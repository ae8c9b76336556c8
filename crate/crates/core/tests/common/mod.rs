//! Reference computations shared by the oracle and acceptance tests.
#![allow(dead_code)]

use sda_core::geometry::Vec2;
use sda_core::quadrature::{make_quadrature, QuadKind};
use sda_core::*;

pub fn params() -> PhysicalParams {
    PhysicalParams {
        nu: 0.7,
        rho_g: 1.3,
        alpha: 0.6,
        delta: 2.0,
        conductivity: Conductivity::new(2.0, 0.3, 0.8).unwrap(),
    }
}

/// Small deterministic generator so the test needs no RNG dependency.
pub fn pseudo_random(n: usize, seed: u64) -> Vec<f64> {
    let mut s = seed;
    (0..n)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .collect()
}

pub fn barycentric(tri: [Vec2; 3], x: Vec2) -> [f64; 3] {
    let [a, b, c] = tri;
    let det = (b - a).cross(c - a);
    let l1 = (x - a).cross(c - a) / det;
    let l2 = (b - a).cross(x - a) / det;
    [1.0 - l1 - l2, l1, l2]
}

pub fn area(tri: [Vec2; 3]) -> f64 {
    0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]).abs()
}

/// `L(U, V) + J_Γ(U, V)` by direct quadrature of the defining integrals.
pub fn bilinear_oracle(mesh: &TwoRegionMesh, u: &DiscreteSolution<'_>, v: &DiscreteSolution<'_>) -> [f64; 7] {
    let p = u.params();
    let k_inv = p.conductivity.inverse();
    let tri = make_quadrature(QuadKind::Triangle, 10).unwrap();
    let edge = make_quadrature(QuadKind::Edge, 10).unwrap();
    // a_f, bjs, b_f terms, a_p, b_p terms, c_Γ, j_Γ
    let mut f = [0.0; 7];
    for t in 0..mesh.num_triangles() {
        let c = mesh.triangle_coords(t);
        let ar = area(c);
        for (l, w) in tri.iter() {
            let wa = w * ar;
            match mesh.region(t) {
                Region::Fluid => {
                    let (_, gu) = u.fluid_velocity(t, l).unwrap();
                    let (_, gv) = v.fluid_velocity(t, l).unwrap();
                    f[0] += wa * 2.0 * p.nu * gu.sym().ddot(&gv.sym());
                    let (pu, qv) = (u.pressure(t, l).unwrap(), v.pressure(t, l).unwrap());
                    f[2] += wa * (-pu * gv.trace() + qv * gu.trace());
                }
                Region::Porous => {
                    let (uu, du) = u.darcy_velocity(t, l).unwrap();
                    let (vv, dv) = v.darcy_velocity(t, l).unwrap();
                    f[3] += wa * p.rho_g * k_inv.mul_vec(uu).dot(vv);
                    let (phi, psi) = (u.head(t).unwrap(), v.head(t).unwrap());
                    f[4] += wa * p.rho_g * (-phi * dv + psi * du);
                }
            }
        }
    }
    let h = mesh.h();
    for e in mesh.edges_of_class(EdgeClass::Interface) {
        let [tf, tp] = mesh.edge_triangles(e);
        let [a, b] = mesh.edge(e);
        let (xa, xb) = (mesh.vertex(a), mesh.vertex(b));
        let len = (xb - xa).norm();
        let n = Vec2::new(0.0, -1.0);
        let tau = Vec2::new(1.0, 0.0);
        let slip = p.alpha / p.conductivity.tangential(tau).sqrt();
        let (cf, cp) = (mesh.triangle_coords(tf), mesh.triangle_coords(tp));
        let phi = u.head(tp).unwrap();
        for (l, w) in edge.iter() {
            let x = xa * l[0] + xb * l[1];
            let (lf, lp) = (barycentric(cf, x), barycentric(cp, x));
            let (uf, vf) = (u.fluid_velocity(tf, &lf).unwrap().0, v.fluid_velocity(tf, &lf).unwrap().0);
            let (up, vp) = (u.darcy_velocity(tp, &lp).unwrap().0, v.darcy_velocity(tp, &lp).unwrap().0);
            let wl = w * len;
            f[1] += wl * slip * uf.dot(tau) * vf.dot(tau);
            f[5] += wl * p.rho_g * phi * (vf - vp).dot(n);
            f[6] += wl * p.delta / h * (uf - up).dot(n) * (vf - vp).dot(n);
        }
    }
    f
}
