//! Assembly of the coupled system `L(U_h, V_h) + J_Γ(U_h, V_h) = F(V_h)`.
//!
//! Every matrix is indexed `(test DOF, trial DOF)` over the full numbering of
//! [`DofLayout`]. Constrained DOFs are eliminated afterwards: their values
//! (the lifting of the boundary data) are moved to the right-hand side.
//!
//! The free system is bordered by one extra row and column: the constraint
//! `∫_{Ω_f} p + ρg ∫_{Ω_p} φ = level` and its Lagrange multiplier, which
//! removes the hydrostatic mode `(p, φ) = (c, c/ρg)`.

use alloc::vec::Vec;

use crate::basis::{edge_moment_weight, ElementMap, ReferenceBasis};
use crate::dofs::{DofLayout, Field};
use crate::element::{bdm_basis, clamp_barycentric, mini_basis};
use crate::geometry::Vec2;
use crate::mesh::{EdgeClass, Region, TwoRegionMesh, NONE};
use crate::params::{PhysicalParams, QuadratureConfig};
use crate::problem::ProblemData;
use crate::quadrature::{make_quadrature, QuadKind, QuadratureRule};
use crate::sparse::{CscMatrix, Triplets};
use crate::{Error, Result};

/// The individual forms of the discrete problem, each as a full-size matrix.
///
/// `b_f` and `b_p` hold `b(v, q)` at `(q, v)`; `c_gamma` holds
/// `c_Γ(v_f − v_p, φ)` at `(v, φ)`. The system matrix is
/// `a_f + bjs − b_fᵀ + b_f + a_p − b_pᵀ + b_p + c_gamma + j_gamma`.
#[derive(Debug, Clone)]
pub struct FormMatrices {
    pub a_f: CscMatrix,
    pub bjs: CscMatrix,
    pub b_f: CscMatrix,
    pub a_p: CscMatrix,
    pub b_p: CscMatrix,
    pub c_gamma: CscMatrix,
    pub j_gamma: CscMatrix,
}

impl FormMatrices {
    pub fn system_matrix(&self) -> CscMatrix {
        let n = self.a_f.nrows();
        let mut t = Triplets::new(n, n);
        let mut add = |m: &CscMatrix, scale: f64, transpose: bool| {
            for c in 0..m.ncols() {
                let (rows, vals) = m.column(c);
                for (&r, &v) in rows.iter().zip(vals) {
                    if transpose {
                        t.push(c, r, scale * v);
                    } else {
                        t.push(r, c, scale * v);
                    }
                }
            }
        };
        add(&self.a_f, 1.0, false);
        add(&self.bjs, 1.0, false);
        add(&self.b_f, -1.0, true);
        add(&self.b_f, 1.0, false);
        add(&self.a_p, 1.0, false);
        add(&self.b_p, -1.0, true);
        add(&self.b_p, 1.0, false);
        add(&self.c_gamma, 1.0, false);
        add(&self.j_gamma, 1.0, false);
        t.to_csc()
    }
}

/// Assembled linear system over the free DOFs plus the level multiplier.
#[derive(Debug, Clone)]
pub struct CoupledSystem {
    layout: DofLayout,
    full_matrix: CscMatrix,
    full_rhs: Vec<f64>,
    lifting: Vec<f64>,
    level_functional: Vec<f64>,
    matrix: CscMatrix,
    rhs: Vec<f64>,
}

impl CoupledSystem {
    pub fn layout(&self) -> &DofLayout {
        &self.layout
    }

    /// Matrix restricted to free rows and columns, bordered by the level
    /// constraint (last row and column).
    pub fn matrix(&self) -> &CscMatrix {
        &self.matrix
    }

    /// `F − A_fc x_c` on the free rows, then the level target.
    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Coefficients of `∫_{Ω_f} p + ρg ∫_{Ω_p} φ` over the full numbering.
    pub fn level_functional(&self) -> &[f64] {
        &self.level_functional
    }

    /// Matrix over all DOFs, constraints not applied.
    pub fn full_matrix(&self) -> &CscMatrix {
        &self.full_matrix
    }

    /// `F(φ_i)` for every basis function.
    pub fn full_rhs(&self) -> &[f64] {
        &self.full_rhs
    }

    /// Full-length vector holding the boundary values on constrained DOFs and
    /// zero elsewhere.
    pub fn lifting(&self) -> &[f64] {
        &self.lifting
    }

    /// Number of free finite element DOFs (the multiplier excluded).
    pub fn num_free(&self) -> usize {
        self.layout.num_free()
    }

    /// Free-DOF range of a field block.
    pub fn block_range(&self, field: Field) -> core::ops::Range<usize> {
        self.layout.free_range(field)
    }

    /// Scatters a free-DOF vector (extra trailing entries ignored) into a
    /// full vector including the lifting.
    pub fn expand(&self, free: &[f64]) -> Vec<f64> {
        let mut x = self.lifting.clone();
        for (d, xd) in x.iter_mut().enumerate() {
            if let Some(i) = self.layout.free_index(d) {
                *xd = free[i];
            }
        }
        x
    }

    /// Copy of the system with the given matrix replaced; for engineered
    /// failure tests and experiments.
    pub fn with_matrix(&self, matrix: CscMatrix) -> Result<Self> {
        if matrix.nrows() != self.rhs.len() || matrix.ncols() != self.rhs.len() {
            return Err(Error::invalid("matrix", "dimension does not match the free DOFs"));
        }
        Ok(CoupledSystem { matrix, ..self.clone() })
    }
}

struct Rules {
    tri: QuadratureRule,
    edge: QuadratureRule,
}

impl Rules {
    fn new(q: &QuadratureConfig) -> Result<Self> {
        Ok(Rules {
            tri: make_quadrature(QuadKind::Triangle, q.triangle)?,
            edge: make_quadrature(QuadKind::Edge, q.edge)?,
        })
    }
}

/// Traces of the fluid and porous bases on a Γ edge at one quadrature point.
pub(crate) struct InterfaceTrace {
    pub fluid_dofs: [usize; 8],
    pub fluid_vals: [Vec2; 8],
    pub darcy_dofs: [usize; 6],
    pub darcy_vals: [Vec2; 6],
}

pub(crate) fn interface_trace(
    mesh: &TwoRegionMesh,
    layout: &DofLayout,
    bdm: &ReferenceBasis,
    e: usize,
    s: f64,
) -> InterfaceTrace {
    let [tf, tp] = mesh.edge_triangles(e);
    let [a, b] = mesh.edge(e);
    let x = mesh.vertex(a) * (1.0 - s) + mesh.vertex(b) * s;
    let mf = ElementMap::new(mesh.triangle_coords(tf));
    let mp = ElementMap::new(mesh.triangle_coords(tp));
    let (fluid_vals, _) = mini_basis(&mf, &clamp_barycentric(mf.to_barycentric(x)));
    let dd = layout.darcy_dofs(mesh, tp);
    let signs = dd.map(|d| d.1);
    let (darcy_vals, _) = bdm_basis(&mp, bdm, &clamp_barycentric(mp.to_barycentric(x)), &signs);
    InterfaceTrace {
        fluid_dofs: layout.fluid_velocity_dofs(mesh, tf),
        fluid_vals,
        darcy_dofs: dd.map(|d| d.0),
        darcy_vals,
    }
}

/// Assembles each form separately.
pub fn assemble_forms(
    mesh: &TwoRegionMesh,
    layout: &DofLayout,
    params: &PhysicalParams,
    quad: &QuadratureConfig,
) -> Result<FormMatrices> {
    params.validate()?;
    let rules = Rules::new(quad)?;
    let n = layout.total();
    let bdm = ReferenceBasis::bdm1();
    let mut a_f = Triplets::new(n, n);
    let mut bjs = Triplets::new(n, n);
    let mut b_f = Triplets::new(n, n);
    let mut a_p = Triplets::new(n, n);
    let mut b_p = Triplets::new(n, n);
    let mut c_gamma = Triplets::new(n, n);
    let mut j_gamma = Triplets::new(n, n);
    let two_nu = 2.0 * params.nu;
    let rho_g = params.rho_g;
    let k_inv = params.conductivity.inverse();

    for t in mesh.triangles_in(Region::Fluid) {
        let map = element_map(mesh, t)?;
        let vd = layout.fluid_velocity_dofs(mesh, t);
        let pd = layout.pressure_dofs(mesh, t);
        let mut ka = [[0.0; 8]; 8];
        let mut kb = [[0.0; 8]; 3];
        for (l, w) in rules.tri.iter() {
            let wa = w * map.area();
            let (_, jac) = mini_basis(&map, l);
            let sym = jac.map(|j| j.sym());
            for i in 0..8 {
                for j in 0..8 {
                    ka[i][j] += wa * two_nu * sym[j].ddot(&sym[i]);
                }
                let div = jac[i].trace();
                for q in 0..3 {
                    kb[q][i] += wa * l[q] * div;
                }
            }
        }
        for i in 0..8 {
            for j in 0..8 {
                a_f.push(vd[i], vd[j], ka[i][j]);
            }
            for q in 0..3 {
                b_f.push(pd[q], vd[i], kb[q][i]);
            }
        }
    }

    for t in mesh.triangles_in(Region::Porous) {
        let map = element_map(mesh, t)?;
        let dd = layout.darcy_dofs(mesh, t);
        let signs = dd.map(|d| d.1);
        let hd = layout.head_dof(t);
        let mut ka = [[0.0; 6]; 6];
        let mut kb = [0.0; 6];
        for (l, w) in rules.tri.iter() {
            let wa = w * map.area();
            let (vals, divs) = bdm_basis(&map, &bdm, l, &signs);
            for i in 0..6 {
                let kv = k_inv.mul_vec(vals[i]);
                for j in 0..6 {
                    ka[i][j] += wa * rho_g * kv.dot(vals[j]);
                }
                kb[i] += wa * rho_g * divs[i];
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                a_p.push(dd[i].0, dd[j].0, ka[i][j]);
            }
            b_p.push(hd, dd[i].0, kb[i]);
        }
    }

    let delta_over_h = params.delta / mesh.h();
    for e in mesh.edges_of_class(EdgeClass::Interface) {
        let len = mesh.edge_length(e);
        let n_f = mesh.edge_normal(e);
        let tau = mesh.edge_tangent(e);
        let slip = params.slip(tau);
        let hd = layout.head_dof(mesh.edge_triangles(e)[1]);
        for qp in 0..rules.edge.len() {
            let w = rules.edge.weights[qp] * len;
            let tr = interface_trace(mesh, layout, &bdm, e, rules.edge.param(qp));
            let ft = tr.fluid_vals.map(|v| v.dot(tau));
            let fnrm = tr.fluid_vals.map(|v| v.dot(n_f));
            let pnrm = tr.darcy_vals.map(|v| v.dot(n_f));
            for i in 0..8 {
                for j in 0..8 {
                    bjs.push(tr.fluid_dofs[i], tr.fluid_dofs[j], w * slip * ft[i] * ft[j]);
                }
                c_gamma.push(tr.fluid_dofs[i], hd, w * rho_g * fnrm[i]);
            }
            for i in 0..6 {
                c_gamma.push(tr.darcy_dofs[i], hd, -w * rho_g * pnrm[i]);
            }
            // jump basis: fluid traces minus Darcy traces
            let jump: Vec<(usize, f64)> = tr
                .fluid_dofs
                .iter()
                .zip(fnrm)
                .map(|(&d, v)| (d, v))
                .chain(tr.darcy_dofs.iter().zip(pnrm).map(|(&d, v)| (d, -v)))
                .collect();
            for &(di, vi) in &jump {
                for &(dj, vj) in &jump {
                    j_gamma.push(di, dj, w * delta_over_h * vi * vj);
                }
            }
        }
    }

    Ok(FormMatrices {
        a_f: a_f.to_csc(),
        bjs: bjs.to_csc(),
        b_f: b_f.to_csc(),
        a_p: a_p.to_csc(),
        b_p: b_p.to_csc(),
        c_gamma: c_gamma.to_csc(),
        j_gamma: j_gamma.to_csc(),
    })
}

/// Load vector `F(φ_i) = (f_f, φ_i)_{Ω_f} + ρg (f_p, φ_i)_{Ω_p}` over all DOFs.
pub fn assemble_rhs(
    mesh: &TwoRegionMesh,
    layout: &DofLayout,
    problem: &dyn ProblemData,
    quad: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let rule = make_quadrature(QuadKind::Triangle, quad.data)?;
    let rho_g = problem.params().rho_g;
    let mut f = alloc::vec![0.0; layout.total()];
    for t in 0..mesh.num_triangles() {
        let map = element_map(mesh, t)?;
        match mesh.region(t) {
            Region::Fluid => {
                let vd = layout.fluid_velocity_dofs(mesh, t);
                for (l, w) in rule.iter() {
                    let wa = w * map.area();
                    let ff = problem.fluid_force(map.to_physical(l));
                    let (vals, _) = mini_basis(&map, l);
                    for i in 0..8 {
                        f[vd[i]] += wa * ff.dot(vals[i]);
                    }
                }
            }
            Region::Porous => {
                let hd = layout.head_dof(t);
                for (l, w) in rule.iter() {
                    f[hd] += w * map.area() * rho_g * problem.porous_source(map.to_physical(l));
                }
            }
        }
    }
    Ok(f)
}

/// Boundary values on constrained DOFs: nodal values of the fluid boundary
/// velocity on Γ_f and global-orientation normal moments of the Darcy
/// boundary velocity on Γ_p.
pub fn boundary_lifting(
    mesh: &TwoRegionMesh,
    layout: &DofLayout,
    problem: &dyn ProblemData,
    quad: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let rule = make_quadrature(QuadKind::Edge, quad.data)?;
    let mut x = alloc::vec![0.0; layout.total()];
    for e in mesh.edges_of_class(EdgeClass::BoundaryFluid) {
        for v in mesh.edge(e) {
            let g = problem.fluid_boundary_velocity(mesh.vertex(v));
            x[layout.velocity_vertex_dof(v, 0)] = g.x();
            x[layout.velocity_vertex_dof(v, 1)] = g.y();
        }
    }
    for e in mesh.edges_of_class(EdgeClass::BoundaryPorous) {
        let m = edge_moments(mesh, e, &rule, |y| problem.porous_boundary_velocity(y));
        x[layout.darcy_dof(e, 0)] = m[0];
        x[layout.darcy_dof(e, 1)] = m[1];
    }
    Ok(x)
}

/// Global BDM1 moments `∫_E g·n_E q_k ds` of a vector field on edge `e`.
pub fn edge_moments(
    mesh: &TwoRegionMesh,
    e: usize,
    rule: &QuadratureRule,
    g: impl Fn(Vec2) -> Vec2,
) -> [f64; 2] {
    let [a, b] = mesh.edge(e);
    let (xa, xb) = (mesh.vertex(a), mesh.vertex(b));
    let n = mesh.edge_normal(e);
    let len = mesh.edge_length(e);
    let mut m = [0.0; 2];
    for qp in 0..rule.len() {
        let s = rule.param(qp);
        let gn = g(xa * (1.0 - s) + xb * s).dot(n) * rule.weights[qp] * len;
        m[0] += gn * edge_moment_weight(0, s);
        m[1] += gn * edge_moment_weight(1, s);
    }
    m
}

pub(crate) fn element_map(mesh: &TwoRegionMesh, t: usize) -> Result<ElementMap> {
    let map = ElementMap::new(mesh.triangle_coords(t));
    if !(map.det > 0.0) {
        return Err(Error::DegenerateTriangle { triangle: t });
    }
    Ok(map)
}

/// Assembles the full system, applies the boundary lifting and restricts to
/// the free DOFs.
pub fn assemble(
    mesh: &TwoRegionMesh,
    problem: &dyn ProblemData,
    quad: &QuadratureConfig,
) -> Result<CoupledSystem> {
    if mesh.edge_table().count(EdgeClass::Interface) == 0 {
        return Err(Error::invalid("mesh", "the interface Γ is empty"));
    }
    let layout = DofLayout::build(mesh);
    let forms = assemble_forms(mesh, &layout, problem.params(), quad)?;
    let full_matrix = forms.system_matrix();
    let full_rhs = assemble_rhs(mesh, &layout, problem, quad)?;
    let lifting = boundary_lifting(mesh, &layout, problem, quad)?;
    let level_functional = level_functional(mesh, &layout, problem.params().rho_g);
    Ok(reduce(layout, full_matrix, full_rhs, lifting, level_functional, problem.level()))
}

/// `ℓ(φ_i)` for `ℓ(U) = ∫_{Ω_f} p + ρg ∫_{Ω_p} φ`.
pub fn level_functional(mesh: &TwoRegionMesh, layout: &DofLayout, rho_g: f64) -> Vec<f64> {
    let mut l = alloc::vec![0.0; layout.total()];
    for t in mesh.triangles_in(Region::Fluid) {
        for d in layout.pressure_dofs(mesh, t) {
            l[d] += mesh.area(t) / 3.0;
        }
    }
    for t in mesh.triangles_in(Region::Porous) {
        l[layout.head_dof(t)] += rho_g * mesh.area(t);
    }
    l
}

fn reduce(
    layout: DofLayout,
    full_matrix: CscMatrix,
    full_rhs: Vec<f64>,
    lifting: Vec<f64>,
    level_functional: Vec<f64>,
    level: f64,
) -> CoupledSystem {
    let n = layout.total();
    let map: Vec<usize> = (0..n).map(|d| layout.free_index(d).unwrap_or(NONE)).collect();
    let nf = layout.num_free();
    let mut t = Triplets::with_capacity(nf + 1, nf + 1, full_matrix.nnz() + 2 * n);
    for c in 0..n {
        if map[c] == NONE {
            continue;
        }
        let (rows, vals) = full_matrix.column(c);
        for (&r, &v) in rows.iter().zip(vals) {
            if map[r] != NONE {
                t.push(map[r], map[c], v);
            }
        }
        if level_functional[c] != 0.0 {
            t.push(nf, map[c], level_functional[c]);
        }
    }
    for d in 0..n {
        if map[d] != NONE && level_functional[d] != 0.0 {
            t.push(map[d], nf, level_functional[d]);
        }
    }
    let matrix = t.to_csc();
    let ax = full_matrix.matvec(&lifting);
    let mut rhs = alloc::vec![0.0; nf + 1];
    for d in 0..n {
        if map[d] != NONE {
            rhs[map[d]] = full_rhs[d] - ax[d];
        }
    }
    rhs[nf] = level;
    CoupledSystem { layout, full_matrix, full_rhs, lifting, level_functional, matrix, rhs }
}
