//! Direct solution of the coupled system and evaluation of the discrete
//! fields.

use alloc::vec::Vec;

use crate::assembly::{assemble, edge_moments, element_map, CoupledSystem};
use crate::basis::ReferenceBasis;
use crate::dofs::{DofLayout, Field};
use crate::element::{bdm_basis, mini_basis, mini_div_sym_grad};
use crate::geometry::{Mat2, Vec2};
use crate::mesh::{Region, TwoRegionMesh};
use crate::params::{PhysicalParams, QuadratureConfig};
use crate::problem::ProblemData;
use crate::quadrature::{make_quadrature, QuadKind};
use crate::sparse::{nested_dissection, symmetric_pattern, LuOptions, SparseLu};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bound on `‖Ax − b‖∞ / ‖b‖∞`.
    pub residual_tolerance: f64,
    /// Bound on `‖Ax‖∞` when `b = 0`.
    pub zero_rhs_tolerance: f64,
    /// Maximum steps of iterative refinement after the direct solve.
    pub refinement_steps: usize,
    /// Largest subgraph left undivided by the nested dissection ordering.
    pub leaf_size: usize,
    pub lu: LuOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            residual_tolerance: 1e-10,
            zero_rhs_tolerance: 1e-12,
            refinement_steps: 3,
            leaf_size: 64,
            lu: LuOptions::default(),
        }
    }
}

/// A mesh together with the assembled system of one problem.
#[derive(Debug, Clone)]
pub struct Discretization<'m> {
    mesh: &'m TwoRegionMesh,
    params: PhysicalParams,
    quad: QuadratureConfig,
    system: CoupledSystem,
}

impl<'m> Discretization<'m> {
    pub fn new(
        mesh: &'m TwoRegionMesh,
        problem: &dyn ProblemData,
        quad: &QuadratureConfig,
    ) -> Result<Self> {
        let system = assemble(mesh, problem, quad)?;
        Ok(Discretization { mesh, params: *problem.params(), quad: *quad, system })
    }

    pub fn mesh(&self) -> &'m TwoRegionMesh {
        self.mesh
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn quadrature(&self) -> &QuadratureConfig {
        &self.quad
    }

    pub fn system(&self) -> &CoupledSystem {
        &self.system
    }

    pub fn layout(&self) -> &DofLayout {
        self.system.layout()
    }

    /// Number of unknowns actually solved for.
    pub fn num_dofs(&self) -> usize {
        self.system.num_free()
    }
}

/// Solves the bordered free-DOF system; returns the solution vector (free
/// DOFs followed by the level multiplier) and the final relative residual.
pub fn solve_system(system: &CoupledSystem, mesh: &TwoRegionMesh, opts: &SolverOptions) -> Result<(Vec<f64>, f64)> {
    let a = system.matrix();
    let b = system.rhs();
    let n = b.len();
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let layout = system.layout();
    let order = fill_reducing_order(system, mesh, opts.leaf_size);
    let lu = SparseLu::factor(a, &order, &opts.lu)
        .map_err(|column| Error::SingularMatrix { column, block: layout.field_of_free(column) })?;
    let mut x = lu.solve(b);
    let bnorm = inf_norm(b);
    let residual = |x: &[f64]| {
        let ax = a.matvec(x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let m = inf_norm(&r);
        (r, m)
    };
    let (mut r, mut rnorm) = residual(&x);
    let scale = if bnorm > 0.0 { bnorm } else { 1.0 };
    let tol = if bnorm > 0.0 { opts.residual_tolerance } else { opts.zero_rhs_tolerance };
    let mut steps = 0;
    while rnorm / scale > 1e-3 * tol && steps < opts.refinement_steps {
        let dx = lu.solve(&r);
        let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let (r2, n2) = residual(&trial);
        if n2 >= rnorm {
            break;
        }
        x = trial;
        r = r2;
        rnorm = n2;
        steps += 1;
    }
    let rel = rnorm / scale;
    if !(rel <= tol) {
        return Err(Error::ResidualTooLarge { relative: rel });
    }
    Ok((x, rel))
}

/// Nested dissection of the free DOFs; the multiplier, which couples to
/// every p and φ DOF, is eliminated last.
fn fill_reducing_order(system: &CoupledSystem, mesh: &TwoRegionMesh, leaf_size: usize) -> Vec<usize> {
    let a = system.matrix();
    let n = a.nrows();
    let mut coords = free_dof_coordinates(mesh, system.layout());
    coords.truncate(n - 1);
    let mut adj = symmetric_pattern(a);
    adj.truncate(n - 1);
    for l in &mut adj {
        l.retain(|&j| j < n - 1);
    }
    let mut order = nested_dissection(&adj, &coords, leaf_size);
    order.push(n - 1);
    order
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Location used to order each free DOF: vertex, centroid or edge midpoint.
fn free_dof_coordinates(mesh: &TwoRegionMesh, layout: &DofLayout) -> Vec<Vec2> {
    let mut full = alloc::vec![Vec2::ZERO; layout.total()];
    for v in 0..mesh.num_vertices() {
        if layout.fluid_vertex_index(v).is_some() {
            full[layout.velocity_vertex_dof(v, 0)] = mesh.vertex(v);
            full[layout.velocity_vertex_dof(v, 1)] = mesh.vertex(v);
            full[layout.pressure_dof(v)] = mesh.vertex(v);
        }
    }
    for t in 0..mesh.num_triangles() {
        match mesh.region(t) {
            Region::Fluid => {
                full[layout.velocity_bubble_dof(t, 0)] = mesh.centroid(t);
                full[layout.velocity_bubble_dof(t, 1)] = mesh.centroid(t);
            }
            Region::Porous => full[layout.head_dof(t)] = mesh.centroid(t),
        }
    }
    for e in 0..mesh.num_edges() {
        if layout.porous_edge_index(e).is_some() {
            let [a, b] = mesh.edge(e);
            let m = mesh.vertex(a).midpoint(mesh.vertex(b));
            full[layout.darcy_dof(e, 0)] = m;
            full[layout.darcy_dof(e, 1)] = m;
        }
    }
    let mut out = alloc::vec![Vec2::ZERO; layout.num_free()];
    for (d, x) in full.into_iter().enumerate() {
        if let Some(i) = layout.free_index(d) {
            out[i] = x;
        }
    }
    out
}

/// Solves the discretized problem.
pub fn solve<'m>(disc: &Discretization<'m>, opts: &SolverOptions) -> Result<DiscreteSolution<'m>> {
    let (x, residual) = solve_system(disc.system(), disc.mesh(), opts)?;
    let coeffs = disc.system().expand(&x);
    let mut sol = DiscreteSolution::from_coefficients(disc.mesh(), *disc.params(), coeffs)?;
    sol.residual = residual;
    sol.multiplier = x[x.len() - 1];
    Ok(sol)
}

/// Value of one discrete field at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldValue {
    Scalar(f64),
    Vector(Vec2),
}

/// `U_h = (u_fh, p_h, u_ph, φ_h)` as a full coefficient vector over the DOF
/// layout of its mesh.
#[derive(Debug, Clone)]
pub struct DiscreteSolution<'m> {
    mesh: &'m TwoRegionMesh,
    layout: DofLayout,
    params: PhysicalParams,
    coeffs: Vec<f64>,
    bdm: ReferenceBasis,
    residual: f64,
    multiplier: f64,
}

impl<'m> DiscreteSolution<'m> {
    pub fn from_coefficients(
        mesh: &'m TwoRegionMesh,
        params: PhysicalParams,
        coeffs: Vec<f64>,
    ) -> Result<Self> {
        let layout = DofLayout::build(mesh);
        if coeffs.len() != layout.total() {
            return Err(Error::invalid(
                "coefficients",
                alloc::format!("expected {} values, got {}", layout.total(), coeffs.len()),
            ));
        }
        Ok(DiscreteSolution { mesh, layout, params, coeffs, bdm: ReferenceBasis::bdm1(), residual: 0.0, multiplier: 0.0 })
    }

    pub fn zero(mesh: &'m TwoRegionMesh, params: PhysicalParams) -> Self {
        let n = DofLayout::build(mesh).total();
        Self::from_coefficients(mesh, params, alloc::vec![0.0; n]).expect("sizes match")
    }

    /// Canonical interpolant: nodal values for u_f (bubble coefficient zero)
    /// and p, edge moments for u_p, element means for φ.
    pub fn interpolate(
        mesh: &'m TwoRegionMesh,
        params: PhysicalParams,
        u_f: &dyn Fn(Vec2) -> Vec2,
        p: &dyn Fn(Vec2) -> f64,
        u_p: &dyn Fn(Vec2) -> Vec2,
        phi: &dyn Fn(Vec2) -> f64,
        quad: &QuadratureConfig,
    ) -> Result<Self> {
        let mut sol = Self::zero(mesh, params);
        let l = &sol.layout;
        let c = &mut sol.coeffs;
        for v in 0..mesh.num_vertices() {
            if l.fluid_vertex_index(v).is_some() {
                let x = mesh.vertex(v);
                let u = u_f(x);
                c[l.velocity_vertex_dof(v, 0)] = u.x();
                c[l.velocity_vertex_dof(v, 1)] = u.y();
                c[l.pressure_dof(v)] = p(x);
            }
        }
        let edge_rule = make_quadrature(QuadKind::Edge, quad.data)?;
        for e in 0..mesh.num_edges() {
            if l.porous_edge_index(e).is_some() {
                let m = edge_moments(mesh, e, &edge_rule, u_p);
                c[l.darcy_dof(e, 0)] = m[0];
                c[l.darcy_dof(e, 1)] = m[1];
            }
        }
        let tri_rule = make_quadrature(QuadKind::Triangle, quad.data)?;
        for t in mesh.triangles_in(Region::Porous) {
            let map = element_map(mesh, t)?;
            c[l.head_dof(t)] = tri_rule.iter().map(|(b, w)| w * phi(map.to_physical(b))).sum();
        }
        Ok(sol)
    }

    pub fn mesh(&self) -> &'m TwoRegionMesh {
        self.mesh
    }

    pub fn layout(&self) -> &DofLayout {
        &self.layout
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Relative algebraic residual reached by the solver.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Lagrange multiplier of the level constraint; zero when the discrete
    /// data are compatible.
    pub fn multiplier(&self) -> f64 {
        self.multiplier
    }

    /// Coefficients restricted to one field block.
    pub fn block(&self, field: Field) -> &[f64] {
        &self.coeffs[self.layout.range(field)]
    }

    fn check(&self, field: Field, t: usize) -> Result<()> {
        if t >= self.mesh.num_triangles() || self.mesh.region(t) != field.region() {
            return Err(Error::RegionMismatch { field, element: t });
        }
        Ok(())
    }

    /// Evaluates a field on element `t` at barycentric point `l`.
    pub fn evaluate(&self, field: Field, t: usize, l: &[f64; 3]) -> Result<FieldValue> {
        Ok(match field {
            Field::FluidVelocity => FieldValue::Vector(self.fluid_velocity(t, l)?.0),
            Field::Pressure => FieldValue::Scalar(self.pressure(t, l)?),
            Field::DarcyVelocity => FieldValue::Vector(self.darcy_velocity(t, l)?.0),
            Field::Head => FieldValue::Scalar(self.head(t)?),
        })
    }

    /// u_fh and its Jacobian (row = component).
    pub fn fluid_velocity(&self, t: usize, l: &[f64; 3]) -> Result<(Vec2, Mat2)> {
        self.check(Field::FluidVelocity, t)?;
        let map = element_map(self.mesh, t)?;
        let (vals, jacs) = mini_basis(&map, l);
        let d = self.layout.fluid_velocity_dofs(self.mesh, t);
        let mut u = Vec2::ZERO;
        let mut g = Mat2::ZERO;
        for i in 0..8 {
            let c = self.coeffs[d[i]];
            u = u + vals[i] * c;
            g = g + jacs[i].scale(c);
        }
        Ok((u, g))
    }

    /// Bubble coefficients of u_fh on a fluid element.
    pub fn bubble_coefficients(&self, t: usize) -> Result<Vec2> {
        self.check(Field::FluidVelocity, t)?;
        Ok(Vec2::new(
            self.coeffs[self.layout.velocity_bubble_dof(t, 0)],
            self.coeffs[self.layout.velocity_bubble_dof(t, 1)],
        ))
    }

    /// `∇·D(u_fh)` at a point (only the bubble contributes).
    pub fn div_sym_grad(&self, t: usize, l: &[f64; 3]) -> Result<Vec2> {
        let c = self.bubble_coefficients(t)?;
        let map = element_map(self.mesh, t)?;
        Ok(mini_div_sym_grad(&map, l, c))
    }

    pub fn pressure(&self, t: usize, l: &[f64; 3]) -> Result<f64> {
        self.check(Field::Pressure, t)?;
        let d = self.layout.pressure_dofs(self.mesh, t);
        Ok((0..3).map(|i| l[i] * self.coeffs[d[i]]).sum())
    }

    pub fn pressure_gradient(&self, t: usize) -> Result<Vec2> {
        self.check(Field::Pressure, t)?;
        let map = element_map(self.mesh, t)?;
        let d = self.layout.pressure_dofs(self.mesh, t);
        Ok((0..3).fold(Vec2::ZERO, |acc, i| acc + map.grad_lambda[i] * self.coeffs[d[i]]))
    }

    /// u_ph and its (constant) divergence.
    pub fn darcy_velocity(&self, t: usize, l: &[f64; 3]) -> Result<(Vec2, f64)> {
        self.check(Field::DarcyVelocity, t)?;
        let map = element_map(self.mesh, t)?;
        let dd = self.layout.darcy_dofs(self.mesh, t);
        let (vals, divs) = bdm_basis(&map, &self.bdm, l, &dd.map(|d| d.1));
        let mut u = Vec2::ZERO;
        let mut div = 0.0;
        for i in 0..6 {
            let c = self.coeffs[dd[i].0];
            u = u + vals[i] * c;
            div += divs[i] * c;
        }
        Ok((u, div))
    }

    /// Jacobian of u_ph (constant on the element).
    pub fn darcy_jacobian(&self, t: usize) -> Result<Mat2> {
        self.check(Field::DarcyVelocity, t)?;
        let map = element_map(self.mesh, t)?;
        let dd = self.layout.darcy_dofs(self.mesh, t);
        let jacs = crate::element::bdm_jacobians(&map, &self.bdm, &dd.map(|d| d.1));
        Ok((0..6).fold(Mat2::ZERO, |acc, i| acc + jacs[i].scale(self.coeffs[dd[i].0])))
    }

    pub fn head(&self, t: usize) -> Result<f64> {
        self.check(Field::Head, t)?;
        Ok(self.coeffs[self.layout.head_dof(t)])
    }
}
