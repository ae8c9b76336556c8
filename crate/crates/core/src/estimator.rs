//! Residual a posteriori error estimator.
//!
//! ```text
//! Θ_{K,f}² = h_K²‖f_fh + 2ν∇·D(u_fh) − ∇p_h‖² + ‖∇·u_fh‖²
//!          + Σ_{E⊂Γ} h_E‖2ν n_f·D(u_fh)·τ + α/√(τ·Kτ) u_fh·τ‖²
//!          + Σ_{E⊂Γ} h_E‖p_h − 2ν n_f·D(u_fh)·n_f − ρgφ_h‖²
//! Θ_{K,p}² = h_K²‖curl(ρgK⁻¹u_ph)‖² + ‖ρg(f_p − ∇·u_ph)‖²
//!          + Σ_{E⊂Ω_p} ‖[ρgK⁻¹u_ph × n]‖² + Σ_{E⊂Ω̄_p∖Γ} h_E‖[ρgφ_h n]‖²
//!          + Σ_{E⊂Γ} (δh_E/h)‖(u_fh − u_ph)·n_f‖²
//! ```
//!
//! The head is piecewise constant, so `∇φ_h` vanishes inside elements and
//! only enters through its jumps.

use alloc::vec::Vec;

use crate::assembly::element_map;
use crate::basis::ElementMap;
use crate::element::clamp_barycentric;
use crate::geometry::Vec2;
use crate::mesh::{EdgeClass, Region, TwoRegionMesh, NONE};
use crate::params::{PhysicalParams, QuadratureConfig};
use crate::problem::ProblemData;
use crate::quadrature::{make_quadrature, QuadKind, QuadratureRule};
use crate::solver::DiscreteSolution;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub struct EstimatorConfig {
    /// Weight the porous tangential-jump term by `h_E`. Off by default, which
    /// is the unweighted form.
    pub scaled_tangential_jump: bool,
    pub quadrature: QuadratureConfig,
}


/// Projected data: element means of `f_f` on fluid triangles and the local L²
/// projection of `f_p` onto P1 on porous triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct DataProjection {
    fluid_means: Vec<Vec2>,
    /// Vertex values of the P1 projection, in triangle vertex order.
    porous_linear: Vec<[f64; 3]>,
}

impl DataProjection {
    pub fn new(mesh: &TwoRegionMesh, problem: &dyn ProblemData, quad: &QuadratureConfig) -> Result<Self> {
        let rule = make_quadrature(QuadKind::Triangle, quad.data)?;
        let nt = mesh.num_triangles();
        let mut fluid_means = alloc::vec![Vec2::ZERO; nt];
        let mut porous_linear = alloc::vec![[0.0; 3]; nt];
        for t in 0..nt {
            let map = element_map(mesh, t)?;
            match mesh.region(t) {
                Region::Fluid => {
                    fluid_means[t] = rule
                        .iter()
                        .fold(Vec2::ZERO, |acc, (l, w)| acc + problem.fluid_force(map.to_physical(l)) * w);
                }
                Region::Porous => {
                    // M = |K|/12 (I + 11ᵀ), so M⁻¹b = 12/|K| (b − Σb/4)
                    let mut b = [0.0; 3];
                    for (l, w) in rule.iter() {
                        let f = problem.porous_source(map.to_physical(l));
                        for i in 0..3 {
                            b[i] += w * f * l[i];
                        }
                    }
                    // b carries ∫ f λᵢ / |K|
                    let s = (b[0] + b[1] + b[2]) / 4.0;
                    porous_linear[t] = b.map(|bi| 12.0 * (bi - s));
                }
            }
        }
        Ok(DataProjection { fluid_means, porous_linear })
    }

    /// `f_fh` on a fluid triangle.
    pub fn fluid_mean(&self, t: usize) -> Vec2 {
        self.fluid_means[t]
    }

    /// `f_ph` at barycentric point `l` of a porous triangle.
    pub fn porous_value(&self, t: usize, l: &[f64; 3]) -> f64 {
        let c = &self.porous_linear[t];
        c[0] * l[0] + c[1] * l[1] + c[2] * l[2]
    }

    pub fn porous_coefficients(&self, t: usize) -> [f64; 3] {
        self.porous_linear[t]
    }
}

/// Squared indicators per triangle with their separate summands.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorField {
    regions: Vec<Region>,
    terms: Vec<[f64; 5]>,
    theta_sq: Vec<f64>,
    zeta_sq: Vec<f64>,
    theta: f64,
    zeta: f64,
}

impl IndicatorField {
    /// Builds the field from per-triangle summands and oscillations.
    pub fn from_parts(regions: Vec<Region>, terms: Vec<[f64; 5]>, zeta_sq: Vec<f64>) -> Result<Self> {
        if terms.len() != regions.len() || zeta_sq.len() != regions.len() {
            return Err(Error::invalid("indicator field", "length mismatch"));
        }
        let theta_sq: Vec<f64> = terms.iter().map(|t| t.iter().sum()).collect();
        let theta = libm::sqrt(theta_sq.iter().sum());
        let zeta = libm::sqrt(zeta_sq.iter().sum());
        Ok(IndicatorField { regions, terms, theta_sq, zeta_sq, theta, zeta })
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn region(&self, t: usize) -> Region {
        self.regions[t]
    }

    /// `Θ_K²` of every triangle.
    pub fn theta_sq(&self) -> &[f64] {
        &self.theta_sq
    }

    /// `ζ_K²` of every triangle.
    pub fn zeta_sq(&self) -> &[f64] {
        &self.zeta_sq
    }

    /// Summands of `Θ_K²`: four fluid terms (last slot zero) or five porous
    /// terms, in the order of the module documentation.
    pub fn terms(&self) -> &[[f64; 5]] {
        &self.terms
    }

    /// `Θ_{K,f}²`, zero on porous triangles.
    pub fn theta_f_sq(&self, t: usize) -> f64 {
        if self.regions[t] == Region::Fluid {
            self.theta_sq[t]
        } else {
            0.0
        }
    }

    /// `Θ_{K,p}²`, zero on fluid triangles.
    pub fn theta_p_sq(&self, t: usize) -> f64 {
        if self.regions[t] == Region::Porous {
            self.theta_sq[t]
        } else {
            0.0
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Sum of one summand over all triangles of a region.
    pub fn term_total(&self, region: Region, term: usize) -> f64 {
        self.regions
            .iter()
            .zip(&self.terms)
            .filter(|(r, _)| **r == region)
            .map(|(_, t)| t[term])
            .sum()
    }
}

struct Rules {
    tri: QuadratureRule,
    edge: QuadratureRule,
    data: QuadratureRule,
}

impl Rules {
    fn new(q: &QuadratureConfig) -> Result<Self> {
        Ok(Rules {
            tri: make_quadrature(QuadKind::Triangle, q.triangle.max(4))?,
            edge: make_quadrature(QuadKind::Edge, q.edge.max(4))?,
            data: make_quadrature(QuadKind::Triangle, q.data)?,
        })
    }
}

/// Barycentric coordinates on `map` of the points of `rule` along edge `e`.
fn edge_points(mesh: &TwoRegionMesh, e: usize, map: &ElementMap, rule: &QuadratureRule) -> Vec<[f64; 3]> {
    let [a, b] = mesh.edge(e);
    let (xa, xb) = (mesh.vertex(a), mesh.vertex(b));
    (0..rule.len())
        .map(|q| {
            let s = rule.param(q);
            clamp_barycentric(map.to_barycentric(xa * (1.0 - s) + xb * s))
        })
        .collect()
}

/// Fluid summands `[T1, T2, T3, T4, 0]` per triangle (zero rows on porous
/// triangles).
pub fn compute_fluid_indicator(
    sol: &DiscreteSolution<'_>,
    proj: &DataProjection,
    config: &EstimatorConfig,
) -> Result<Vec<[f64; 5]>> {
    let mesh = sol.mesh();
    let params = sol.params();
    let rules = Rules::new(&config.quadrature)?;
    let two_nu = 2.0 * params.nu;
    let mut out = alloc::vec![[0.0; 5]; mesh.num_triangles()];
    for t in mesh.triangles_in(Region::Fluid) {
        let map = element_map(mesh, t)?;
        let area = map.area();
        let hk = mesh.diameter(t);
        let grad_p = sol.pressure_gradient(t)?;
        let f = proj.fluid_mean(t);
        let (mut r, mut d) = (0.0, 0.0);
        for (l, w) in rules.tri.iter() {
            let res = f + sol.div_sym_grad(t, l)? * two_nu - grad_p;
            r += w * res.dot(res);
            let div = sol.fluid_velocity(t, l)?.1.trace();
            d += w * div * div;
        }
        out[t][0] = hk * hk * area * r;
        out[t][1] = area * d;
    }
    for e in mesh.edges_of_class(EdgeClass::Interface) {
        let [tf, tp] = mesh.edge_triangles(e);
        let map = element_map(mesh, tf)?;
        let n = mesh.edge_normal(e);
        let tau = mesh.edge_tangent(e);
        let slip = params.slip(tau);
        let phi = sol.head(tp)?;
        let he = mesh.edge_length(e);
        let pts = edge_points(mesh, e, &map, &rules.edge);
        let (mut tang, mut normal) = (0.0, 0.0);
        for (l, w) in pts.iter().zip(rules.edge.weights.iter().copied()) {
            let (u, g) = sol.fluid_velocity(tf, l)?;
            let dn = g.sym().mul_vec(n);
            let rt = two_nu * dn.dot(tau) + slip * u.dot(tau);
            let rn = sol.pressure(tf, l)? - two_nu * dn.dot(n) - params.rho_g * phi;
            tang += w * rt * rt;
            normal += w * rn * rn;
        }
        out[tf][2] += he * he * tang;
        out[tf][3] += he * he * normal;
    }
    Ok(out)
}

/// Porous summands `[P1, …, P5]` per triangle (zero rows on fluid
/// triangles). The mass residual uses the raw source `f_p`.
pub fn compute_porous_indicator(
    sol: &DiscreteSolution<'_>,
    problem: &dyn ProblemData,
    config: &EstimatorConfig,
) -> Result<Vec<[f64; 5]>> {
    let mesh = sol.mesh();
    let params = sol.params();
    let rules = Rules::new(&config.quadrature)?;
    let rg = params.rho_g;
    let k_inv = params.conductivity.inverse();
    let mut out = alloc::vec![[0.0; 5]; mesh.num_triangles()];
    for t in mesh.triangles_in(Region::Porous) {
        let map = element_map(mesh, t)?;
        let area = map.area();
        let hk = mesh.diameter(t);
        let g = k_inv.mul_mat(&sol.darcy_jacobian(t)?).scale(rg);
        let curl = g.0[1][0] - g.0[0][1];
        out[t][0] = hk * hk * area * curl * curl;
        let div = sol.darcy_velocity(t, &[1.0 / 3.0; 3])?.1;
        let mut m = 0.0;
        for (l, w) in rules.data.iter() {
            let r = rg * (problem.porous_source(map.to_physical(l)) - div);
            m += w * r * r;
        }
        out[t][1] = area * m;
    }
    for e in 0..mesh.num_edges() {
        let class = mesh.edge_class(e);
        let he = mesh.edge_length(e);
        let [t0, t1] = mesh.edge_triangles(e);
        match class {
            EdgeClass::InteriorPorous => {
                let n = mesh.edge_normal(e);
                let (m0, m1) = (element_map(mesh, t0)?, element_map(mesh, t1)?);
                let (p0, p1) = (edge_points(mesh, e, &m0, &rules.edge), edge_points(mesh, e, &m1, &rules.edge));
                let mut j = 0.0;
                for q in 0..rules.edge.len() {
                    let w = sol.darcy_velocity(t0, &p0[q])?.0 - sol.darcy_velocity(t1, &p1[q])?.0;
                    let c = k_inv.mul_vec(w).cross(n) * rg;
                    j += rules.edge.weights[q] * c * c;
                }
                let scale = if config.scaled_tangential_jump { he } else { 1.0 };
                let tj = scale * he * j;
                let dphi = rg * (sol.head(t0)? - sol.head(t1)?);
                let hj = he * he * dphi * dphi;
                for t in [t0, t1] {
                    out[t][2] += tj;
                    out[t][3] += hj;
                }
            }
            EdgeClass::BoundaryPorous => {
                debug_assert_eq!(t1, NONE);
                let v = rg * sol.head(t0)?;
                out[t0][3] += he * he * v * v;
            }
            EdgeClass::Interface => {
                let (tf, tp) = (t0, t1);
                let n = mesh.edge_normal(e);
                let (mf, mp) = (element_map(mesh, tf)?, element_map(mesh, tp)?);
                let (pf, pp) = (edge_points(mesh, e, &mf, &rules.edge), edge_points(mesh, e, &mp, &rules.edge));
                let mut j = 0.0;
                for q in 0..rules.edge.len() {
                    let d = (sol.fluid_velocity(tf, &pf[q])?.0 - sol.darcy_velocity(tp, &pp[q])?.0).dot(n);
                    j += rules.edge.weights[q] * d * d;
                }
                out[tp][4] += params.delta * he / mesh.h() * he * j;
            }
            _ => {}
        }
    }
    Ok(out)
}

/// `ζ_K²`: `h_K²‖f_f − f_fh‖²` on fluid and `ρg²‖f_p − f_ph‖²` on porous
/// triangles.
pub fn compute_oscillation(
    mesh: &TwoRegionMesh,
    problem: &dyn ProblemData,
    proj: &DataProjection,
    quad: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let rule = make_quadrature(QuadKind::Triangle, quad.data)?;
    let rg = problem.params().rho_g;
    (0..mesh.num_triangles())
        .map(|t| {
            let map = element_map(mesh, t)?;
            let area = map.area();
            Ok(match mesh.region(t) {
                Region::Fluid => {
                    let hk = mesh.diameter(t);
                    let mean = proj.fluid_mean(t);
                    let s: f64 = rule
                        .iter()
                        .map(|(l, w)| {
                            let d = problem.fluid_force(map.to_physical(l)) - mean;
                            w * d.dot(d)
                        })
                        .sum();
                    hk * hk * area * s
                }
                Region::Porous => {
                    let s: f64 = rule
                        .iter()
                        .map(|(l, w)| {
                            let d = problem.porous_source(map.to_physical(l)) - proj.porous_value(t, l);
                            w * d * d
                        })
                        .sum();
                    rg * rg * area * s
                }
            })
        })
        .collect()
}

/// Full indicator field of a discrete solution.
pub fn estimate(
    sol: &DiscreteSolution<'_>,
    problem: &dyn ProblemData,
    config: &EstimatorConfig,
) -> Result<IndicatorField> {
    let mesh = sol.mesh();
    check_params(sol.params(), problem.params())?;
    let proj = DataProjection::new(mesh, problem, &config.quadrature)?;
    let fluid = compute_fluid_indicator(sol, &proj, config)?;
    let porous = compute_porous_indicator(sol, problem, config)?;
    let zeta_sq = compute_oscillation(mesh, problem, &proj, &config.quadrature)?;
    let terms = (0..mesh.num_triangles())
        .map(|t| match mesh.region(t) {
            Region::Fluid => fluid[t],
            Region::Porous => porous[t],
        })
        .collect();
    IndicatorField::from_parts(mesh.regions().to_vec(), terms, zeta_sq)
}

fn check_params(a: &PhysicalParams, b: &PhysicalParams) -> Result<()> {
    if a != b {
        return Err(Error::invalid("parameters", "solution and problem data disagree"));
    }
    Ok(())
}
