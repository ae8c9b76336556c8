//! Newest-vertex bisection with conforming closure.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{Region, TwoRegionMesh};
use crate::{Error, Result};

/// Bisects every marked triangle (and whatever the closure requires) by
/// newest-vertex bisection. Region tags are inherited by the children; Γ
/// edges are split on both sides because the closure acts on shared edges.
pub fn bisect(mesh: &TwoRegionMesh, marked: &[usize]) -> Result<TwoRegionMesh> {
    let nt = mesh.num_triangles();
    if let Some(&t) = marked.iter().find(|&&t| t >= nt) {
        return Err(Error::invalid("marked set", alloc::format!("triangle {t} out of range")));
    }
    if marked.is_empty() {
        return Ok(mesh.clone());
    }
    let topo = mesh.edge_table();
    let mut split = alloc::vec![false; mesh.num_edges()];
    let mut stack: Vec<usize> = Vec::new();
    for &t in marked {
        let e = topo.triangle_edges[t][0];
        if !split[e] {
            split[e] = true;
            stack.push(e);
        }
    }
    // Closure: a triangle with any split edge must split its refinement edge.
    while let Some(e) = stack.pop() {
        for &t in &topo.edge_triangles[e] {
            if t == super::NONE {
                continue;
            }
            let r = topo.triangle_edges[t][0];
            if !split[r] {
                split[r] = true;
                stack.push(r);
            }
        }
    }

    let mut vertices = mesh.vertices().to_vec();
    let mut midpoints = BTreeMap::new();
    for (e, _) in split.iter().enumerate().filter(|(_, &s)| s) {
        let [a, b] = topo.edges[e];
        midpoints.insert((a, b), vertices.len());
        vertices.push(vertices[a].midpoint(vertices[b]));
    }

    let mut triangles = Vec::with_capacity(nt + 2 * midpoints.len());
    let mut regions = Vec::with_capacity(nt + 2 * midpoints.len());
    for t in 0..nt {
        refine_recursive(mesh.triangle(t), mesh.region(t), &midpoints, &mut triangles, &mut regions);
    }
    TwoRegionMesh::new(vertices, triangles, regions)
}

fn refine_recursive(
    tri: [usize; 3],
    region: Region,
    midpoints: &BTreeMap<(usize, usize), usize>,
    out: &mut Vec<[usize; 3]>,
    regions: &mut Vec<Region>,
) {
    let [v0, v1, v2] = tri;
    match midpoints.get(&(v1.min(v2), v1.max(v2))) {
        Some(&m) => {
            refine_recursive([m, v0, v1], region, midpoints, out, regions);
            refine_recursive([m, v2, v0], region, midpoints, out, regions);
        }
        None => {
            out.push(tri);
            regions.push(region);
        }
    }
}

/// Two rounds of bisection of every triangle; halves the mesh size.
pub fn refine_uniform(mesh: &TwoRegionMesh) -> Result<TwoRegionMesh> {
    let all: Vec<usize> = (0..mesh.num_triangles()).collect();
    let once = bisect(mesh, &all)?;
    let all: Vec<usize> = (0..once.num_triangles()).collect();
    bisect(&once, &all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::EdgeClass;

    #[test]
    fn empty_marking_is_identity() {
        let m = TwoRegionMesh::rectangle_benchmark(2, 2).unwrap();
        assert_eq!(bisect(&m, &[]).unwrap(), m);
    }

    #[test]
    fn marking_all_at_least_doubles() {
        let m = TwoRegionMesh::rectangle_benchmark(3, 2).unwrap();
        let all: Vec<usize> = (0..m.num_triangles()).collect();
        let r = bisect(&m, &all).unwrap();
        assert!(r.num_triangles() >= 2 * m.num_triangles());
        r.validate(10.0).unwrap();
    }

    #[test]
    fn interface_neighbour_refined_by_closure() {
        let m = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
        let e = m.edges_of_class(EdgeClass::Interface).next().unwrap();
        let [tf, tp] = m.edge_triangles(e);
        assert_eq!(m.region(tf), Region::Fluid);
        // first bisection splits the cell diagonal, the second the Γ leg
        let r1 = bisect(&m, &[tf]).unwrap();
        let e1 = r1.edges_of_class(EdgeClass::Interface).find(|&e| r1.edge(e) == m.edge(e)).unwrap();
        let child = r1.edge_triangles(e1)[0];
        assert_eq!(r1.triangle_edges(child)[0], e1);
        let r = bisect(&r1, &[child]).unwrap();
        r.validate(10.0).unwrap();
        let gamma_before = m.edge_table().count(EdgeClass::Interface);
        let gamma_after = r.edge_table().count(EdgeClass::Interface);
        assert_eq!(gamma_after, gamma_before + 1);
        // the porous neighbour no longer exists unrefined
        assert!(!r.triangles().contains(&m.triangle(tp)));
        let len: f64 = r.edges_of_class(EdgeClass::Interface).map(|e| r.edge_length(e)).sum();
        assert!((len - 1.0).abs() < 1e-14);
    }

    #[test]
    fn uniform_refinement_halves_h() {
        let m = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
        let r = refine_uniform(&m).unwrap();
        assert!((r.h() - m.h() / 2.0).abs() < 1e-15);
        assert_eq!(r.num_triangles(), 4 * m.num_triangles());
    }

    #[test]
    fn out_of_range_mark_rejected() {
        let m = TwoRegionMesh::rectangle_benchmark(1, 2).unwrap();
        assert!(bisect(&m, &[4]).is_err());
    }
}
