//! Fill-reducing column ordering by geometric nested dissection.

use alloc::vec::Vec;

use super::CscMatrix;
use crate::geometry::Vec2;

/// Adjacency lists of the pattern of `A + A^T`, diagonal removed.
pub fn symmetric_pattern(a: &CscMatrix) -> Vec<Vec<usize>> {
    let n = a.ncols();
    assert_eq!(a.nrows(), n, "ordering needs a square matrix");
    let mut adj = alloc::vec![Vec::new(); n];
    for c in 0..n {
        for &r in a.column(c).0 {
            if r != c {
                adj[c].push(r);
                adj[r].push(c);
            }
        }
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    adj
}

/// Orders the nodes of a graph by recursive coordinate bisection. At each
/// level the nodes on the lower side adjacent to the upper side form the
/// separator, which is numbered after both halves. Returns `perm` with
/// `perm[k]` = node eliminated at step `k`.
pub fn nested_dissection(adj: &[Vec<usize>], coords: &[Vec2], leaf_size: usize) -> Vec<usize> {
    let n = adj.len();
    assert_eq!(coords.len(), n);
    let mut side = alloc::vec![0u8; n];
    let mut out = Vec::with_capacity(n);
    let nodes: Vec<usize> = (0..n).collect();
    dissect(nodes, adj, coords, leaf_size.max(1), &mut side, &mut out);
    out
}

fn dissect(
    mut nodes: Vec<usize>,
    adj: &[Vec<usize>],
    coords: &[Vec2],
    leaf: usize,
    side: &mut [u8],
    out: &mut Vec<usize>,
) {
    if nodes.len() <= leaf {
        out.extend_from_slice(&nodes);
        return;
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for &i in &nodes {
        for d in 0..2 {
            lo[d] = lo[d].min(coords[i].0[d]);
            hi[d] = hi[d].max(coords[i].0[d]);
        }
    }
    let axis = if hi[0] - lo[0] >= hi[1] - lo[1] { 0 } else { 1 };
    if hi[axis] - lo[axis] <= 0.0 {
        out.extend_from_slice(&nodes);
        return;
    }
    nodes.sort_by(|&a, &b| {
        coords[a].0[axis].total_cmp(&coords[b].0[axis]).then(a.cmp(&b))
    });
    let cut = coords[nodes[nodes.len() / 2]].0[axis];
    let mut split = nodes.partition_point(|&i| coords[i].0[axis] < cut);
    if split == 0 {
        split = nodes.partition_point(|&i| coords[i].0[axis] <= cut);
    }
    if split == 0 || split == nodes.len() {
        out.extend_from_slice(&nodes);
        return;
    }
    let right = nodes.split_off(split);
    let left = nodes;
    for &i in &left {
        side[i] = 1;
    }
    for &i in &right {
        side[i] = 2;
    }
    let mut sep = Vec::new();
    let mut rest = Vec::with_capacity(left.len());
    for &i in &left {
        if adj[i].iter().any(|&j| side[j] == 2) {
            sep.push(i);
        } else {
            rest.push(i);
        }
    }
    for &i in left.iter().chain(&right) {
        side[i] = 0;
    }
    dissect(rest, adj, coords, leaf, side, out);
    dissect(right, adj, coords, leaf, side, out);
    out.extend_from_slice(&sep);
}
