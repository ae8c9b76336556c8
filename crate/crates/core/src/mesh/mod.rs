//! Conforming two-region triangulations.
//!
//! Triangles are stored counter-clockwise with local vertex 0 as the newest
//! vertex, so the refinement edge of `[v0, v1, v2]` is `(v1, v2)`. Local edge
//! `i` is the edge opposite local vertex `i`, traversed `v_{i+1} → v_{i+2}`.

mod refine;

use alloc::vec::Vec;
use core::fmt;

pub use refine::{bisect, refine_uniform};

use crate::geometry::{signed_area, Vec2};
use crate::{Error, Result};

/// Sentinel for "no neighbour" in [`TwoRegionMesh::edge_triangles`].
pub const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    Fluid,
    Porous,
}

impl Region {
    pub fn tag(self) -> char {
        match self {
            Region::Fluid => 'f',
            Region::Porous => 'p',
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Fluid => "fluid",
            Region::Porous => "porous",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeClass {
    InteriorFluid,
    InteriorPorous,
    /// Γ: one fluid and one porous neighbour.
    Interface,
    /// Γ_f: exterior boundary of the fluid region.
    BoundaryFluid,
    /// Γ_p: exterior boundary of the porous region.
    BoundaryPorous,
}

impl EdgeClass {
    pub const ALL: [EdgeClass; 5] = [
        EdgeClass::InteriorFluid,
        EdgeClass::InteriorPorous,
        EdgeClass::Interface,
        EdgeClass::BoundaryFluid,
        EdgeClass::BoundaryPorous,
    ];

    pub fn is_boundary(self) -> bool {
        matches!(self, EdgeClass::BoundaryFluid | EdgeClass::BoundaryPorous)
    }

    /// Edge belongs to the closure of the porous region.
    pub fn touches_porous(self) -> bool {
        matches!(
            self,
            EdgeClass::InteriorPorous | EdgeClass::Interface | EdgeClass::BoundaryPorous
        )
    }

    pub fn touches_fluid(self) -> bool {
        matches!(
            self,
            EdgeClass::InteriorFluid | EdgeClass::Interface | EdgeClass::BoundaryFluid
        )
    }
}

/// Edge topology derived from a triangle list.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTable {
    /// Vertex pairs, lower index first, sorted lexicographically.
    pub edges: Vec<[usize; 2]>,
    /// Neighbouring triangles; the second slot is [`NONE`] on the boundary.
    pub edge_triangles: Vec<[usize; 2]>,
    pub triangle_edges: Vec<[usize; 3]>,
    pub classes: Vec<EdgeClass>,
}

impl EdgeTable {
    pub fn count(&self, class: EdgeClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }
}

/// Builds the edge table and assigns every edge exactly one class.
///
/// Fails on edges shared by more than two triangles.
pub fn classify_edges(triangles: &[[usize; 3]], regions: &[Region]) -> Result<EdgeTable> {
    let mut half: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(3 * triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        for i in 0..3 {
            let a = tri[(i + 1) % 3];
            let b = tri[(i + 2) % 3];
            half.push((a.min(b), a.max(b), t, i));
        }
    }
    half.sort_unstable();

    let mut edges = Vec::new();
    let mut edge_triangles = Vec::new();
    let mut classes = Vec::new();
    let mut triangle_edges = alloc::vec![[NONE; 3]; triangles.len()];
    let mut k = 0;
    while k < half.len() {
        let (a, b, _, _) = half[k];
        let mut j = k;
        while j < half.len() && half[j].0 == a && half[j].1 == b {
            j += 1;
        }
        let group = &half[k..j];
        if group.len() > 2 {
            return Err(Error::NonConformingEdge { edge: (a, b), neighbors: group.len() });
        }
        let id = edges.len();
        edges.push([a, b]);
        let t0 = group[0].2;
        let t1 = group.get(1).map_or(NONE, |g| g.2);
        for g in group {
            triangle_edges[g.2][g.3] = id;
        }
        let class = if t1 == NONE {
            match regions[t0] {
                Region::Fluid => EdgeClass::BoundaryFluid,
                Region::Porous => EdgeClass::BoundaryPorous,
            }
        } else {
            match (regions[t0], regions[t1]) {
                (Region::Fluid, Region::Fluid) => EdgeClass::InteriorFluid,
                (Region::Porous, Region::Porous) => EdgeClass::InteriorPorous,
                _ => EdgeClass::Interface,
            }
        };
        // Interface edges list the fluid neighbour first.
        let pair = if class == EdgeClass::Interface && regions[t0] == Region::Porous {
            [t1, t0]
        } else {
            [t0, t1]
        };
        edge_triangles.push(pair);
        classes.push(class);
        k = j;
    }
    Ok(EdgeTable { edges, edge_triangles, triangle_edges, classes })
}

/// Conforming triangulation of Ω = Ω_f ∪ Γ ∪ Ω_p in struct-of-arrays layout.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoRegionMesh {
    vertices: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
    regions: Vec<Region>,
    topo: EdgeTable,
    edge_normals: Vec<Vec2>,
    edge_lengths: Vec<f64>,
    areas: Vec<f64>,
    diameters: Vec<f64>,
    h: f64,
}

impl TwoRegionMesh {
    /// Builds a mesh, reorienting clockwise triangles (local vertex 0 is
    /// kept) and checking conformity.
    pub fn new(
        vertices: Vec<Vec2>,
        mut triangles: Vec<[usize; 3]>,
        regions: Vec<Region>,
    ) -> Result<Self> {
        if triangles.len() != regions.len() {
            return Err(Error::invalid("mesh", "one region tag per triangle required"));
        }
        if triangles.is_empty() {
            return Err(Error::invalid("mesh", "no triangles"));
        }
        let mut areas = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter_mut().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::invalid("mesh", "vertex index out of range"));
            }
            let a = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if !(libm::fabs(a) > 0.0) || !a.is_finite() {
                return Err(Error::DegenerateTriangle { triangle: t });
            }
            if a < 0.0 {
                tri.swap(1, 2);
            }
            areas.push(libm::fabs(a));
        }
        let topo = classify_edges(&triangles, &regions)?;
        check_hanging_vertices(&vertices, &topo)?;

        let diameters: Vec<f64> = triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|v| vertices[v]);
                (a - b).norm().max((b - c).norm()).max((c - a).norm())
            })
            .collect();
        let h = diameters.iter().copied().fold(0.0, f64::max);
        let edge_lengths =
            topo.edges.iter().map(|&[a, b]| (vertices[b] - vertices[a]).norm()).collect();
        let edge_normals = topo
            .edges
            .iter()
            .zip(&topo.classes)
            .zip(&topo.edge_triangles)
            .map(|((&[a, b], &class), nb)| {
                let n = (vertices[b] - vertices[a]).normalized().rot_cw();
                if class == EdgeClass::Interface {
                    let tf = triangles[nb[0]];
                    let c = (vertices[tf[0]] + vertices[tf[1]] + vertices[tf[2]]) * (1.0 / 3.0);
                    let mid = vertices[a].midpoint(vertices[b]);
                    if n.dot(mid - c) < 0.0 {
                        return -n;
                    }
                }
                n
            })
            .collect();

        Ok(TwoRegionMesh {
            vertices,
            triangles,
            regions,
            topo,
            edge_normals,
            edge_lengths,
            areas,
            diameters,
            h,
        })
    }

    /// Structured mesh of `[0,1]²` with fluid on top, porous below and
    /// Γ = {y = 1/2}. Each cell is split along its (x+, y+) diagonal.
    pub fn rectangle_benchmark(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::invalid("benchmark", "cell counts must be positive"));
        }
        if ny % 2 != 0 {
            return Err(Error::invalid("benchmark", "ny must be even so that Γ lies on y = 1/2"));
        }
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push(Vec2::new(i as f64 / nx as f64, j as f64 / ny as f64));
            }
        }
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        let mut regions = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            let region = if 2 * j < ny { Region::Porous } else { Region::Fluid };
            for i in 0..nx {
                let a = j * (nx + 1) + i;
                let b = a + 1;
                let c = b + nx + 1;
                let d = a + nx + 1;
                // right-angle vertex first: the diagonal is the refinement edge
                triangles.push([b, c, a]);
                triangles.push([d, a, c]);
                regions.push(region);
                regions.push(region);
            }
        }
        TwoRegionMesh::new(vertices, triangles, regions)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Vec2 {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn triangle_coords(&self, t: usize) -> [Vec2; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region(&self, t: usize) -> Region {
        self.regions[t]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.topo.edges.len()
    }

    pub fn edge_table(&self) -> &EdgeTable {
        &self.topo
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.topo.edges[e]
    }

    pub fn edge_class(&self, e: usize) -> EdgeClass {
        self.topo.classes[e]
    }

    /// Neighbours of edge `e`; for Γ edges the fluid triangle comes first.
    pub fn edge_triangles(&self, e: usize) -> [usize; 2] {
        self.topo.edge_triangles[e]
    }

    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.topo.triangle_edges[t]
    }

    /// Unit normal n_E: rotation of the lower→higher vertex tangent, except on
    /// Γ where it equals n_f (pointing from the fluid into the porous side).
    pub fn edge_normal(&self, e: usize) -> Vec2 {
        self.edge_normals[e]
    }

    /// Unit tangent, rotated so that (n_E, τ_E) is positively oriented.
    pub fn edge_tangent(&self, e: usize) -> Vec2 {
        let n = self.edge_normals[e];
        Vec2::new(-n.y(), n.x())
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.edge_lengths[e]
    }

    pub fn area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    /// h_K: longest edge.
    pub fn diameter(&self, t: usize) -> f64 {
        self.diameters[t]
    }

    /// ρ_K: diameter of the inscribed circle.
    pub fn inradius_diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_coords(t);
        let perimeter = (a - b).norm() + (b - c).norm() + (c - a).norm();
        4.0 * self.areas[t] / perimeter
    }

    /// Global h = max h_K.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn centroid(&self, t: usize) -> Vec2 {
        let [a, b, c] = self.triangle_coords(t);
        (a + b + c) * (1.0 / 3.0)
    }

    pub fn edges_of_class(&self, class: EdgeClass) -> impl Iterator<Item = usize> + '_ {
        self.topo.classes.iter().enumerate().filter(move |(_, &c)| c == class).map(|(e, _)| e)
    }

    pub fn triangles_in(&self, region: Region) -> impl Iterator<Item = usize> + '_ {
        self.regions.iter().enumerate().filter(move |(_, &r)| r == region).map(|(t, _)| t)
    }

    pub fn region_area(&self, region: Region) -> f64 {
        self.triangles_in(region).map(|t| self.areas[t]).sum()
    }

    /// Largest ratio h_K / ρ_K.
    pub fn shape_regularity(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| self.diameters[t] / self.inradius_diameter(t))
            .fold(0.0, f64::max)
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        let mut best = f64::INFINITY;
        for t in 0..self.num_triangles() {
            let p = self.triangle_coords(t);
            for i in 0..3 {
                let u = p[(i + 1) % 3] - p[i];
                let v = p[(i + 2) % 3] - p[i];
                let ang = libm::atan2(libm::fabs(u.cross(v)), u.dot(v));
                best = best.min(ang);
            }
        }
        best
    }

    /// Sign (+1/−1) of n_E relative to the outward normal of triangle `t` on
    /// its local edge `i`.
    pub fn outward_sign(&self, t: usize, i: usize) -> f64 {
        let e = self.topo.triangle_edges[t][i];
        let tri = self.triangles[t];
        let out = (self.vertices[tri[(i + 2) % 3]] - self.vertices[tri[(i + 1) % 3]]).rot_cw();
        if out.dot(self.edge_normals[e]) > 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Checks every structural invariant plus shape regularity `h_K ≤ c₂ ρ_K`.
    pub fn validate(&self, c2: f64) -> Result<()> {
        let fresh = classify_edges(&self.triangles, &self.regions)?;
        if fresh != self.topo {
            return Err(Error::MeshInvariant("cached edge table out of date"));
        }
        check_hanging_vertices(&self.vertices, &self.topo)?;
        for e in 0..self.num_edges() {
            let [t0, t1] = self.topo.edge_triangles[e];
            match self.topo.classes[e] {
                EdgeClass::Interface => {
                    if self.regions[t0] != Region::Fluid || self.regions[t1] != Region::Porous {
                        return Err(Error::MeshInvariant("interface edge without fluid/porous pair"));
                    }
                    let n = self.edge_normals[e];
                    if libm::fabs(n.dot(n) - 1.0) > 1e-12 {
                        return Err(Error::MeshInvariant("interface normal not unit"));
                    }
                    let [a, b] = self.topo.edges[e];
                    let mid = self.vertices[a].midpoint(self.vertices[b]);
                    if n.dot(self.centroid(t1) - mid) <= 0.0 || n.dot(self.centroid(t0) - mid) >= 0.0
                    {
                        return Err(Error::MeshInvariant("interface normal not fluid→porous"));
                    }
                }
                EdgeClass::BoundaryFluid | EdgeClass::BoundaryPorous => {
                    if t1 != NONE {
                        return Err(Error::MeshInvariant("boundary edge with two neighbours"));
                    }
                }
                _ => {
                    if t1 == NONE || self.regions[t0] != self.regions[t1] {
                        return Err(Error::MeshInvariant("interior edge with mixed neighbours"));
                    }
                }
            }
        }
        if self.shape_regularity() > c2 {
            return Err(Error::MeshInvariant("shape regularity bound exceeded"));
        }
        Ok(())
    }
}

/// A vertex sitting strictly inside a boundary edge marks a hanging node: the
/// edge is only "boundary" because its other side was split without it.
fn check_hanging_vertices(vertices: &[Vec2], topo: &EdgeTable) -> Result<()> {
    let boundary: Vec<usize> =
        (0..topo.edges.len()).filter(|&e| topo.edge_triangles[e][1] == NONE).collect();
    let mut ends: Vec<usize> = boundary.iter().flat_map(|&e| topo.edges[e]).collect();
    ends.sort_unstable();
    ends.dedup();
    for &e in &boundary {
        let [a, b] = topo.edges[e];
        let (pa, pb) = (vertices[a], vertices[b]);
        let d = pb - pa;
        let len2 = d.dot(d);
        for &v in &ends {
            if v == a || v == b {
                continue;
            }
            let w = vertices[v] - pa;
            let s = w.dot(d) / len2;
            if s > 1e-12 && s < 1.0 - 1e-12 && libm::fabs(d.cross(w)) <= 1e-12 * len2 {
                return Err(Error::HangingVertex { vertex: v });
            }
        }
    }
    Ok(())
}
