//! Indicator terms recomputed from point evaluations of the discrete fields.
//! Derivatives come from central differences, which are exact (up to
//! rounding) for the quadratic Jacobians of MINI and the linear BDM1 fields.

use sda_core::estimator::{compute_oscillation, DataProjection};
use sda_core::geometry::{Mat2, Vec2};
use sda_core::quadrature::{make_quadrature, QuadKind};
use sda_core::*;

fn barycentric(tri: [Vec2; 3], x: Vec2) -> [f64; 3] {
    let [a, b, c] = tri;
    let det = (b - a).cross(c - a);
    let l1 = (x - a).cross(c - a) / det;
    let l2 = (b - a).cross(x - a) / det;
    [1.0 - l1 - l2, l1, l2]
}

fn diameter(tri: [Vec2; 3]) -> f64 {
    (0..3).map(|i| (tri[i] - tri[(i + 1) % 3]).norm()).fold(0.0, f64::max)
}

fn area(tri: [Vec2; 3]) -> f64 {
    0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]).abs()
}

fn central<T, F>(f: F, x: Vec2, eps: f64) -> [T; 2]
where
    F: Fn(Vec2) -> T,
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let d = |e: Vec2| (f(x + e * eps) - f(x - e * eps)) * (0.5 / eps);
    [d(Vec2::new(1.0, 0.0)), d(Vec2::new(0.0, 1.0))]
}

struct Reference {
    terms: Vec<[f64; 5]>,
}

fn recompute(mesh: &TwoRegionMesh, sol: &DiscreteSolution<'_>, case: &ManufacturedCase) -> Reference {
    let p = *case.params();
    let k_inv = p.conductivity.inverse();
    let tri = make_quadrature(QuadKind::Triangle, 12).unwrap();
    // data integrals at degree 8; the polynomial terms are exact at 12
    let data = make_quadrature(QuadKind::Triangle, 8).unwrap();
    let edge = make_quadrature(QuadKind::Edge, 12).unwrap();
    let mut terms = vec![[0.0; 5]; mesh.num_triangles()];
    for t in 0..mesh.num_triangles() {
        let c = mesh.triangle_coords(t);
        let (ar, hk) = (area(c), diameter(c));
        let eps = 1e-3 * hk;
        let at = |l: &[f64; 3]| c[0] * l[0] + c[1] * l[1] + c[2] * l[2];
        match mesh.region(t) {
            Region::Fluid => {
                let mut mean = Vec2::ZERO;
                for (l, w) in data.iter() {
                    mean = mean + case.f_f(at(l)) * w;
                }
                let grad = |x: Vec2| sol.fluid_velocity(t, &barycentric(c, x)).unwrap().1;
                let pres = |x: Vec2| sol.pressure(t, &barycentric(c, x)).unwrap();
                let (mut r, mut d) = (0.0, 0.0);
                for (l, w) in tri.iter() {
                    let x = at(l);
                    let dg: [Mat2; 2] = [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]
                        .map(|e| (grad(x + e * eps).sym() - grad(x - e * eps).sym()).scale(0.5 / eps));
                    // (∇·D)_i = Σ_j ∂_j D_ij
                    let div_d = Vec2::new(dg[0].0[0][0] + dg[1].0[0][1], dg[0].0[1][0] + dg[1].0[1][1]);
                    let gp = central(pres, x, eps);
                    let res = mean + div_d * (2.0 * p.nu) - Vec2::new(gp[0], gp[1]);
                    r += w * res.dot(res);
                    d += w * grad(x).trace().powi(2);
                }
                terms[t][0] = hk * hk * ar * r;
                terms[t][1] = ar * d;
            }
            Region::Porous => {
                let vel = |x: Vec2| sol.darcy_velocity(t, &barycentric(c, x)).unwrap().0;
                let x0 = at(&[1.0 / 3.0; 3]);
                let dv = central(|y| k_inv.mul_vec(vel(y)) * p.rho_g, x0, eps);
                let curl = dv[0].y() - dv[1].x();
                terms[t][0] = hk * hk * ar * curl * curl;
                let gv = central(vel, x0, eps);
                let div = gv[0].x() + gv[1].y();
                let m: f64 = data.iter().map(|(l, w)| w * (p.rho_g * (case.f_p(at(l)) - div)).powi(2)).sum();
                terms[t][1] = ar * m;
            }
        }
    }
    for e in 0..mesh.num_edges() {
        let [a, b] = mesh.edge(e);
        let (xa, xb) = (mesh.vertex(a), mesh.vertex(b));
        let he = (xb - xa).norm();
        let tang = (xb - xa) * (1.0 / he);
        let n = Vec2::new(tang.y(), -tang.x());
        let [t0, t1] = mesh.edge_triangles(e);
        let pts: Vec<(Vec2, f64)> = edge.iter().map(|(l, w)| (xa * l[0] + xb * l[1], w * he)).collect();
        match mesh.edge_class(e) {
            EdgeClass::Interface => {
                let (tf, tp) = (t0, t1);
                let (cf, cp) = (mesh.triangle_coords(tf), mesh.triangle_coords(tp));
                let nf = Vec2::new(0.0, -1.0);
                let slip = p.alpha / p.conductivity.tangential(tang).sqrt();
                let phi = sol.head(tp).unwrap();
                let (mut rt, mut rn, mut jump) = (0.0, 0.0, 0.0);
                for &(x, w) in &pts {
                    let (u, g) = sol.fluid_velocity(tf, &barycentric(cf, x)).unwrap();
                    let dn = g.sym().mul_vec(nf);
                    rt += w * (2.0 * p.nu * dn.dot(tang) + slip * u.dot(tang)).powi(2);
                    let pr = sol.pressure(tf, &barycentric(cf, x)).unwrap();
                    rn += w * (pr - 2.0 * p.nu * dn.dot(nf) - p.rho_g * phi).powi(2);
                    let up = sol.darcy_velocity(tp, &barycentric(cp, x)).unwrap().0;
                    jump += w * (u - up).dot(nf).powi(2);
                }
                terms[tf][2] += he * rt;
                terms[tf][3] += he * rn;
                terms[tp][4] += p.delta * he / mesh.h() * jump;
            }
            EdgeClass::InteriorPorous => {
                let (c0, c1) = (mesh.triangle_coords(t0), mesh.triangle_coords(t1));
                let mut j = 0.0;
                for &(x, w) in &pts {
                    let d = sol.darcy_velocity(t0, &barycentric(c0, x)).unwrap().0
                        - sol.darcy_velocity(t1, &barycentric(c1, x)).unwrap().0;
                    j += w * (k_inv.mul_vec(d) * p.rho_g).cross(n).powi(2);
                }
                let dphi = p.rho_g * (sol.head(t0).unwrap() - sol.head(t1).unwrap());
                for t in [t0, t1] {
                    terms[t][2] += j;
                    terms[t][3] += he * he * dphi * dphi;
                }
            }
            EdgeClass::BoundaryPorous => {
                terms[t0][3] += he * he * (p.rho_g * sol.head(t0).unwrap()).powi(2);
            }
            _ => {}
        }
    }
    Reference { terms }
}

#[test]
fn indicator_terms_match_recomputation() {
    for name in ["smooth", "layer"] {
        let mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
        let case = ManufacturedCase::from_name(name).unwrap();
        let q = QuadratureConfig::default();
        let disc = Discretization::new(&mesh, &case, &q).unwrap();
        let sol = solve(&disc, &SolverOptions::default()).unwrap();
        let ind = estimate(&sol, &case, &EstimatorConfig::default()).unwrap();
        let reference = recompute(&mesh, &sol, &case);
        for t in 0..mesh.num_triangles() {
            let want: f64 = reference.terms[t].iter().sum();
            let got = ind.theta_sq()[t];
            assert!((got - want).abs() <= 1e-8 * want, "{name} K{t}: {got} vs {want}");
            for k in 0..5 {
                let (a, b) = (ind.terms()[t][k], reference.terms[t][k]);
                assert!((a - b).abs() <= 1e-8 * want, "{name} K{t} term {k}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn oscillation_matches_recomputation() {
    struct Sine(PhysicalParams);
    impl ProblemData for Sine {
        fn params(&self) -> &PhysicalParams {
            &self.0
        }
        fn fluid_force(&self, x: Vec2) -> Vec2 {
            Vec2::new((std::f64::consts::PI * x.x()).sin(), 0.0)
        }
        fn porous_source(&self, x: Vec2) -> f64 {
            (x.x() * x.y()).exp()
        }
    }
    let mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let data = Sine(PhysicalParams { rho_g: 1.7, ..Default::default() });
    let q = QuadratureConfig::default();
    let proj = DataProjection::new(&mesh, &data, &q).unwrap();
    let zeta = compute_oscillation(&mesh, &data, &proj, &q).unwrap();
    let rule = make_quadrature(QuadKind::Triangle, 8).unwrap();
    for t in 0..mesh.num_triangles() {
        let c = mesh.triangle_coords(t);
        let at = |l: &[f64; 3]| c[0] * l[0] + c[1] * l[1] + c[2] * l[2];
        let ar = area(c);
        let want = match mesh.region(t) {
            Region::Fluid => {
                let mean = rule.iter().fold(Vec2::ZERO, |m, (l, w)| m + data.fluid_force(at(l)) * w);
                let s: f64 = rule
                    .iter()
                    .map(|(l, w)| {
                        let d = data.fluid_force(at(l)) - mean;
                        w * d.dot(d)
                    })
                    .sum();
                diameter(c).powi(2) * ar * s
            }
            Region::Porous => {
                // P1 projection from the 3×3 mass system solved directly
                let mut m = [[0.0; 3]; 3];
                let mut b = [0.0; 3];
                for (l, w) in rule.iter() {
                    for i in 0..3 {
                        b[i] += w * l[i] * data.porous_source(at(l));
                        for j in 0..3 {
                            m[i][j] += w * l[i] * l[j];
                        }
                    }
                }
                let coef = solve3(m, b);
                let s: f64 = rule
                    .iter()
                    .map(|(l, w)| {
                        let fh = coef[0] * l[0] + coef[1] * l[1] + coef[2] * l[2];
                        w * (data.porous_source(at(l)) - fh).powi(2)
                    })
                    .sum();
                1.7f64.powi(2) * ar * s
            }
        };
        assert!((zeta[t] - want).abs() <= 1e-8 * want, "K{t}: {} vs {want}", zeta[t]);
    }
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    let mut x = [0.0; 3];
    for k in 0..3 {
        let mut mk = m;
        for i in 0..3 {
            mk[i][k] = b[i];
        }
        x[k] = det(&mk) / d;
    }
    x
}
