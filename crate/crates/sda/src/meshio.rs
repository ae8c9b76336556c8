//! Plain-text mesh files.
//!
//! ```text
//! ndim=2 <nv> <nt>
//! <x> <y>                 (nv lines)
//! <v0> <v1> <v2> <f|p>    (nt lines)
//! ```
//!
//! Vertex and triangle order are kept as read; orientation is normalized by
//! [`TwoRegionMesh::new`].

use std::fmt::Write as _;
use std::path::Path;

use sda_core::geometry::Vec2;
use sda_core::{Region, TwoRegionMesh};

use crate::error::{CliError, CliResult};

pub fn parse_mesh(text: &str, origin: &str) -> CliResult<TwoRegionMesh> {
    let bad = |line: usize, message: String| CliError::Parse { path: origin.to_string(), line, message };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hl, header) = lines.next().ok_or_else(|| bad(1, "empty mesh file".into()))?;
    let mut h = header.split_whitespace();
    if h.next() != Some("ndim=2") {
        return Err(bad(hl, format!("expected header `ndim=2 nv nt`, found `{header}`")));
    }
    let mut count = |what: &str| -> CliResult<usize> {
        h.next()
            .ok_or_else(|| bad(hl, format!("header lacks {what}")))?
            .parse()
            .map_err(|e| bad(hl, format!("{what}: {e}")))
    };
    let nv = count("vertex count")?;
    let nt = count("triangle count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| bad(0, format!("expected {nv} vertices")))?;
        let xy: Vec<f64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| bad(ln, format!("vertex: {e}")))?;
        if xy.len() != 2 {
            return Err(bad(ln, format!("vertex needs 2 coordinates, got {}", xy.len())));
        }
        vertices.push(Vec2::new(xy[0], xy[1]));
    }

    let mut triangles = Vec::with_capacity(nt);
    let mut regions = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, l) = lines.next().ok_or_else(|| bad(0, format!("expected {nt} triangles")))?;
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() != 4 {
            return Err(bad(ln, "triangle line must be `v0 v1 v2 f|p`".into()));
        }
        let mut tri = [0usize; 3];
        for (k, t) in tok[..3].iter().enumerate() {
            tri[k] = t.parse().map_err(|e| bad(ln, format!("vertex index: {e}")))?;
            if tri[k] >= nv {
                return Err(bad(ln, format!("vertex index {} out of range", tri[k])));
            }
        }
        regions.push(match tok[3] {
            "f" => Region::Fluid,
            "p" => Region::Porous,
            other => return Err(bad(ln, format!("region must be f or p, got `{other}`"))),
        });
        triangles.push(tri);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(bad(ln, "trailing content after the last triangle".into()));
    }
    Ok(TwoRegionMesh::new(vertices, triangles, regions)?)
}

pub fn read_mesh(path: &Path) -> CliResult<TwoRegionMesh> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_mesh(&text, &path.display().to_string())
}

/// Coordinates are written with shortest round-trip formatting, so
/// `parse_mesh(format_mesh(m))` reproduces `m` exactly.
pub fn format_mesh(mesh: &TwoRegionMesh) -> String {
    let mut s = String::new();
    writeln!(s, "ndim=2 {} {}", mesh.num_vertices(), mesh.num_triangles()).unwrap();
    for v in mesh.vertices() {
        writeln!(s, "{:?} {:?}", v.x(), v.y()).unwrap();
    }
    for (t, r) in mesh.triangles().iter().zip(mesh.regions()) {
        writeln!(s, "{} {} {} {}", t[0], t[1], t[2], r.tag()).unwrap();
    }
    s
}

pub fn write_mesh(path: &Path, mesh: &TwoRegionMesh) -> CliResult<()> {
    std::fs::write(path, format_mesh(mesh)).map_err(|e| CliError::io(path, e))
}
