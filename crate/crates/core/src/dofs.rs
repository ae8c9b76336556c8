//! Degree-of-freedom layout for the four discrete fields.
//!
//! Global numbering is blocked `[u_f | p | u_p | φ]`:
//! * u_f (MINI): `2·v + c` for fluid vertex `v`, component `c`, followed by
//!   `2·(#fluid vertices) + 2·t + c` for the bubble of fluid triangle `t`;
//! * p (P1): one per fluid vertex;
//! * u_p (BDM1): `2·e + k` for porous edge `e`, moment `k`;
//! * φ (P0): one per porous triangle.

use alloc::vec::Vec;
use core::fmt;

use crate::mesh::{EdgeClass, Region, TwoRegionMesh, NONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    FluidVelocity,
    Pressure,
    DarcyVelocity,
    Head,
}

impl Field {
    pub const ALL: [Field; 4] =
        [Field::FluidVelocity, Field::Pressure, Field::DarcyVelocity, Field::Head];

    pub fn region(self) -> Region {
        match self {
            Field::FluidVelocity | Field::Pressure => Region::Fluid,
            Field::DarcyVelocity | Field::Head => Region::Porous,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::FluidVelocity => "u_f",
            Field::Pressure => "p",
            Field::DarcyVelocity => "u_p",
            Field::Head => "phi",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    fluid_vertex: Vec<usize>,
    fluid_triangle: Vec<usize>,
    porous_edge: Vec<usize>,
    porous_triangle: Vec<usize>,
    n_fluid_vertices: usize,
    n_fluid_triangles: usize,
    n_porous_edges: usize,
    n_porous_triangles: usize,
    offsets: [usize; 5],
    constrained: Vec<bool>,
    free_index: Vec<usize>,
    free_offsets: [usize; 5],
    /// σ_n per (triangle, local edge): +1 when n_E is the outward normal.
    normal_sign: Vec<[f64; 3]>,
    /// σ_s per (triangle, local edge): +1 when the local traversal runs from
    /// the lower to the higher global vertex index.
    traversal_sign: Vec<[f64; 3]>,
}

impl DofLayout {
    pub fn build(mesh: &TwoRegionMesh) -> Self {
        let nv = mesh.num_vertices();
        let nt = mesh.num_triangles();
        let ne = mesh.num_edges();
        let mut fluid_vertex = alloc::vec![NONE; nv];
        let mut fluid_triangle = alloc::vec![NONE; nt];
        let mut porous_triangle = alloc::vec![NONE; nt];
        let (mut nfv, mut nft, mut npt) = (0, 0, 0);
        for t in 0..nt {
            match mesh.region(t) {
                Region::Fluid => {
                    fluid_triangle[t] = nft;
                    nft += 1;
                }
                Region::Porous => {
                    porous_triangle[t] = npt;
                    npt += 1;
                }
            }
        }
        // vertex numbering follows global vertex order
        let mut touches_fluid = alloc::vec![false; nv];
        for t in mesh.triangles_in(Region::Fluid) {
            for v in mesh.triangle(t) {
                touches_fluid[v] = true;
            }
        }
        for v in 0..nv {
            if touches_fluid[v] {
                fluid_vertex[v] = nfv;
                nfv += 1;
            }
        }
        let mut porous_edge = alloc::vec![NONE; ne];
        let mut npe = 0;
        for e in 0..ne {
            if mesh.edge_class(e).touches_porous() {
                porous_edge[e] = npe;
                npe += 1;
            }
        }

        let n_uf = 2 * nfv + 2 * nft;
        let offsets = [0, n_uf, n_uf + nfv, n_uf + nfv + 2 * npe, n_uf + nfv + 2 * npe + npt];
        let total = offsets[4];

        let mut constrained = alloc::vec![false; total];
        for e in mesh.edges_of_class(EdgeClass::BoundaryFluid) {
            for v in mesh.edge(e) {
                let lv = fluid_vertex[v];
                constrained[2 * lv] = true;
                constrained[2 * lv + 1] = true;
            }
        }
        for e in mesh.edges_of_class(EdgeClass::BoundaryPorous) {
            let le = porous_edge[e];
            constrained[offsets[2] + 2 * le] = true;
            constrained[offsets[2] + 2 * le + 1] = true;
        }

        let mut free_index = alloc::vec![NONE; total];
        let mut free_offsets = [0; 5];
        let mut nfree = 0;
        for b in 0..4 {
            free_offsets[b] = nfree;
            for d in offsets[b]..offsets[b + 1] {
                if !constrained[d] {
                    free_index[d] = nfree;
                    nfree += 1;
                }
            }
        }
        free_offsets[4] = nfree;

        let mut normal_sign = alloc::vec![[0.0; 3]; nt];
        let mut traversal_sign = alloc::vec![[0.0; 3]; nt];
        for t in mesh.triangles_in(Region::Porous) {
            let tri = mesh.triangle(t);
            for i in 0..3 {
                normal_sign[t][i] = mesh.outward_sign(t, i);
                traversal_sign[t][i] = if tri[(i + 1) % 3] < tri[(i + 2) % 3] { 1.0 } else { -1.0 };
            }
        }

        DofLayout {
            fluid_vertex,
            fluid_triangle,
            porous_edge,
            porous_triangle,
            n_fluid_vertices: nfv,
            n_fluid_triangles: nft,
            n_porous_edges: npe,
            n_porous_triangles: npt,
            offsets,
            constrained,
            free_index,
            free_offsets,
            normal_sign,
            traversal_sign,
        }
    }

    fn block_index(field: Field) -> usize {
        match field {
            Field::FluidVelocity => 0,
            Field::Pressure => 1,
            Field::DarcyVelocity => 2,
            Field::Head => 3,
        }
    }

    pub fn total(&self) -> usize {
        self.offsets[4]
    }

    pub fn num_free(&self) -> usize {
        self.free_offsets[4]
    }

    /// Global range of a field block.
    pub fn range(&self, field: Field) -> core::ops::Range<usize> {
        let b = Self::block_index(field);
        self.offsets[b]..self.offsets[b + 1]
    }

    /// Range of a field block in the free (reduced) numbering.
    pub fn free_range(&self, field: Field) -> core::ops::Range<usize> {
        let b = Self::block_index(field);
        self.free_offsets[b]..self.free_offsets[b + 1]
    }

    pub fn count(&self, field: Field) -> usize {
        self.range(field).len()
    }

    pub fn field_of(&self, dof: usize) -> Field {
        let b = (0..4).find(|&b| dof < self.offsets[b + 1]).expect("dof in range");
        Field::ALL[b]
    }

    pub fn field_of_free(&self, free: usize) -> Option<Field> {
        (0..4).find(|&b| free < self.free_offsets[b + 1]).map(|b| Field::ALL[b])
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    pub fn constrained_mask(&self) -> &[bool] {
        &self.constrained
    }

    /// Free index of a global DOF, or `None` if constrained.
    pub fn free_index(&self, dof: usize) -> Option<usize> {
        let f = self.free_index[dof];
        (f != NONE).then_some(f)
    }

    pub fn num_fluid_vertices(&self) -> usize {
        self.n_fluid_vertices
    }

    pub fn num_fluid_triangles(&self) -> usize {
        self.n_fluid_triangles
    }

    pub fn num_porous_edges(&self) -> usize {
        self.n_porous_edges
    }

    pub fn num_porous_triangles(&self) -> usize {
        self.n_porous_triangles
    }

    pub fn fluid_vertex_index(&self, v: usize) -> Option<usize> {
        let i = self.fluid_vertex[v];
        (i != NONE).then_some(i)
    }

    pub fn porous_edge_index(&self, e: usize) -> Option<usize> {
        let i = self.porous_edge[e];
        (i != NONE).then_some(i)
    }

    pub fn porous_triangle_index(&self, t: usize) -> Option<usize> {
        let i = self.porous_triangle[t];
        (i != NONE).then_some(i)
    }

    /// Velocity DOF of fluid vertex `v` (global vertex id), component `c`.
    pub fn velocity_vertex_dof(&self, v: usize, c: usize) -> usize {
        2 * self.fluid_vertex[v] + c
    }

    /// Bubble DOF of fluid triangle `t` (global triangle id), component `c`.
    pub fn velocity_bubble_dof(&self, t: usize, c: usize) -> usize {
        2 * self.n_fluid_vertices + 2 * self.fluid_triangle[t] + c
    }

    pub fn pressure_dof(&self, v: usize) -> usize {
        self.offsets[1] + self.fluid_vertex[v]
    }

    pub fn darcy_dof(&self, e: usize, k: usize) -> usize {
        self.offsets[2] + 2 * self.porous_edge[e] + k
    }

    pub fn head_dof(&self, t: usize) -> usize {
        self.offsets[3] + self.porous_triangle[t]
    }

    /// Local u_f DOFs of a fluid triangle, ordered `2a + c` with `a = 0..3`
    /// the vertices and `a = 3` the bubble.
    pub fn fluid_velocity_dofs(&self, mesh: &TwoRegionMesh, t: usize) -> [usize; 8] {
        let tri = mesh.triangle(t);
        let mut d = [0; 8];
        for c in 0..2 {
            for a in 0..3 {
                d[2 * a + c] = self.velocity_vertex_dof(tri[a], c);
            }
            d[6 + c] = self.velocity_bubble_dof(t, c);
        }
        d
    }

    pub fn pressure_dofs(&self, mesh: &TwoRegionMesh, t: usize) -> [usize; 3] {
        mesh.triangle(t).map(|v| self.pressure_dof(v))
    }

    /// Local BDM1 DOFs (index `2i + k`) of a porous triangle with the sign
    /// relating the local reference basis to the global one.
    pub fn darcy_dofs(&self, mesh: &TwoRegionMesh, t: usize) -> [(usize, f64); 6] {
        let edges = mesh.triangle_edges(t);
        let mut d = [(0, 0.0); 6];
        for i in 0..3 {
            let sn = self.normal_sign[t][i];
            let ss = self.traversal_sign[t][i];
            d[2 * i] = (self.darcy_dof(edges[i], 0), sn);
            d[2 * i + 1] = (self.darcy_dof(edges[i], 1), sn * ss);
        }
        d
    }

    pub fn normal_sign(&self, t: usize, i: usize) -> f64 {
        self.normal_sign[t][i]
    }

    pub fn traversal_sign(&self, t: usize, i: usize) -> f64 {
        self.traversal_sign[t][i]
    }
}
