//! Legacy ASCII VTK unstructured grids.
//!
//! Continuous fields (pressure, fluid velocity) are point data; the Darcy
//! velocity and the piecewise constant head are cell data. Values outside a
//! field's region are written as zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sda_core::{DiscreteSolution, Region, TwoRegionMesh};

use crate::error::{CliError, CliResult};
use crate::report::float;

const VTK_TRIANGLE: u8 = 5;

/// Named data arrays with a fixed number of components per tuple.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Arrays {
    pub scalars: BTreeMap<String, Vec<f64>>,
    /// Three components per tuple.
    pub vectors: BTreeMap<String, Vec<[f64; 3]>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VtkGrid {
    pub title: String,
    pub points: Vec<[f64; 3]>,
    pub cells: Vec<Vec<usize>>,
    pub cell_types: Vec<u8>,
    pub point_data: Arrays,
    pub cell_data: Arrays,
}

impl VtkGrid {
    pub fn from_solution(sol: &DiscreteSolution<'_>) -> CliResult<Self> {
        let mesh = sol.mesh();
        let mut grid = mesh_grid(mesh);
        let nv = mesh.num_vertices();
        let mut pressure = vec![0.0; nv];
        let mut u_f = vec![[0.0; 3]; nv];
        for t in mesh.triangles_in(Region::Fluid) {
            for (i, &v) in mesh.triangle(t).iter().enumerate() {
                let mut l = [0.0; 3];
                l[i] = 1.0;
                pressure[v] = sol.pressure(t, &l)?;
                let u = sol.fluid_velocity(t, &l)?.0;
                u_f[v] = [u.x(), u.y(), 0.0];
            }
        }
        let nt = mesh.num_triangles();
        let mut head = vec![0.0; nt];
        let mut u_p = vec![[0.0; 3]; nt];
        for t in mesh.triangles_in(Region::Porous) {
            head[t] = sol.head(t)?;
            let u = sol.darcy_velocity(t, &[1.0 / 3.0; 3])?.0;
            u_p[t] = [u.x(), u.y(), 0.0];
        }
        grid.point_data.scalars.insert("pressure".into(), pressure);
        grid.point_data.vectors.insert("fluid_velocity".into(), u_f);
        grid.cell_data.scalars.insert("head".into(), head);
        grid.cell_data.vectors.insert("darcy_velocity".into(), u_p);
        Ok(grid)
    }

    pub fn to_legacy(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# vtk DataFile Version 3.0\n{}\nASCII\nDATASET UNSTRUCTURED_GRID", self.title).unwrap();
        writeln!(s, "POINTS {} double", self.points.len()).unwrap();
        for p in &self.points {
            writeln!(s, "{} {} {}", float(p[0]), float(p[1]), float(p[2])).unwrap();
        }
        let size: usize = self.cells.iter().map(|c| c.len() + 1).sum();
        writeln!(s, "CELLS {} {size}", self.cells.len()).unwrap();
        for c in &self.cells {
            let ids: Vec<String> = c.iter().map(usize::to_string).collect();
            writeln!(s, "{} {}", c.len(), ids.join(" ")).unwrap();
        }
        writeln!(s, "CELL_TYPES {}", self.cell_types.len()).unwrap();
        for t in &self.cell_types {
            writeln!(s, "{t}").unwrap();
        }
        write_arrays(&mut s, "POINT_DATA", self.points.len(), &self.point_data);
        write_arrays(&mut s, "CELL_DATA", self.cells.len(), &self.cell_data);
        s
    }

    /// Reads the subset of the legacy format written by [`Self::to_legacy`].
    pub fn parse_legacy(text: &str) -> CliResult<Self> {
        let mut lines = text.lines().enumerate();
        let mut next = |what: &str| -> CliResult<(usize, &str)> {
            lines
                .next()
                .map(|(i, l)| (i + 1, l.trim()))
                .ok_or_else(|| vtk_error(0, format!("unexpected end of file, expected {what}")))
        };
        let (ln, magic) = next("header")?;
        if !magic.starts_with("# vtk DataFile Version") {
            return Err(vtk_error(ln, "missing `# vtk DataFile Version` header"));
        }
        let title = next("title")?.1.to_string();
        expect(next("ASCII")?, "ASCII")?;
        expect(next("DATASET")?, "DATASET UNSTRUCTURED_GRID")?;

        let (ln, l) = next("POINTS")?;
        let np = section_count(ln, l, "POINTS")?;
        let mut grid = VtkGrid { title, ..Default::default() };
        for _ in 0..np {
            let (ln, l) = next("point")?;
            let v = numbers::<f64>(ln, l)?;
            if v.len() != 3 {
                return Err(vtk_error(ln, "point needs 3 coordinates"));
            }
            grid.points.push([v[0], v[1], v[2]]);
        }

        let (ln, l) = next("CELLS")?;
        let nc = section_count(ln, l, "CELLS")?;
        for _ in 0..nc {
            let (ln, l) = next("cell")?;
            let v = numbers::<usize>(ln, l)?;
            if v.is_empty() || v[0] + 1 != v.len() || v[1..].iter().any(|&i| i >= np) {
                return Err(vtk_error(ln, "malformed cell"));
            }
            grid.cells.push(v[1..].to_vec());
        }
        let (ln, l) = next("CELL_TYPES")?;
        if section_count(ln, l, "CELL_TYPES")? != nc {
            return Err(vtk_error(ln, "CELL_TYPES count differs from CELLS"));
        }
        for _ in 0..nc {
            let (ln, l) = next("cell type")?;
            grid.cell_types.push(l.parse().map_err(|e| vtk_error(ln, format!("cell type: {e}")))?);
        }

        let mut current: Option<(&mut Arrays, usize)> = None;
        let (mut pd, mut cd) = (Arrays::default(), Arrays::default());
        while let Ok((ln, l)) = next("data") {
            if l.is_empty() {
                continue;
            }
            let tok: Vec<&str> = l.split_whitespace().collect();
            match tok[0] {
                "POINT_DATA" => current = Some((&mut pd, check_count(ln, l, np)?)),
                "CELL_DATA" => current = Some((&mut cd, check_count(ln, l, nc)?)),
                "SCALARS" | "VECTORS" => {
                    let (arrays, n) = current.as_mut().ok_or_else(|| vtk_error(ln, "data array outside a data section"))?;
                    let name = tok.get(1).ok_or_else(|| vtk_error(ln, "array without a name"))?.to_string();
                    if tok[0] == "SCALARS" {
                        let (ln, l) = next("LOOKUP_TABLE")?;
                        if !l.starts_with("LOOKUP_TABLE") {
                            return Err(vtk_error(ln, "expected LOOKUP_TABLE"));
                        }
                        let mut v = Vec::with_capacity(*n);
                        for _ in 0..*n {
                            let (ln, l) = next("scalar")?;
                            v.push(l.parse().map_err(|e| vtk_error(ln, format!("scalar: {e}")))?);
                        }
                        arrays.scalars.insert(name, v);
                    } else {
                        let mut v = Vec::with_capacity(*n);
                        for _ in 0..*n {
                            let (ln, l) = next("vector")?;
                            let x = numbers::<f64>(ln, l)?;
                            if x.len() != 3 {
                                return Err(vtk_error(ln, "vector needs 3 components"));
                            }
                            v.push([x[0], x[1], x[2]]);
                        }
                        arrays.vectors.insert(name, v);
                    }
                }
                other => return Err(vtk_error(ln, format!("unsupported keyword `{other}`"))),
            }
        }
        grid.point_data = pd;
        grid.cell_data = cd;
        Ok(grid)
    }
}

/// A grid holding only the mesh and its region flags.
pub fn mesh_grid(mesh: &TwoRegionMesh) -> VtkGrid {
    let mut grid = VtkGrid {
        title: "sda solution".into(),
        points: mesh.vertices().iter().map(|v| [v.x(), v.y(), 0.0]).collect(),
        cells: mesh.triangles().iter().map(|t| t.to_vec()).collect(),
        cell_types: vec![VTK_TRIANGLE; mesh.num_triangles()],
        ..Default::default()
    };
    let region = mesh.regions().iter().map(|r| if *r == Region::Porous { 1.0 } else { 0.0 }).collect();
    grid.cell_data.scalars.insert("region".into(), region);
    grid
}

fn write_arrays(s: &mut String, section: &str, n: usize, arrays: &Arrays) {
    if arrays.scalars.is_empty() && arrays.vectors.is_empty() {
        return;
    }
    writeln!(s, "{section} {n}").unwrap();
    for (name, v) in &arrays.scalars {
        writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default").unwrap();
        for x in v {
            writeln!(s, "{}", float(*x)).unwrap();
        }
    }
    for (name, v) in &arrays.vectors {
        writeln!(s, "VECTORS {name} double").unwrap();
        for x in v {
            writeln!(s, "{} {} {}", float(x[0]), float(x[1]), float(x[2])).unwrap();
        }
    }
}

fn vtk_error(line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { path: "vtk".into(), line, message: message.into() }
}

fn expect((ln, l): (usize, &str), want: &str) -> CliResult<()> {
    if l == want {
        Ok(())
    } else {
        Err(vtk_error(ln, format!("expected `{want}`, found `{l}`")))
    }
}

fn section_count(ln: usize, l: &str, keyword: &str) -> CliResult<usize> {
    let mut tok = l.split_whitespace();
    if tok.next() != Some(keyword) {
        return Err(vtk_error(ln, format!("expected {keyword}")));
    }
    tok.next()
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| vtk_error(ln, format!("{keyword} needs a count")))
}

fn check_count(ln: usize, l: &str, want: usize) -> CliResult<usize> {
    let n: usize = l
        .split_whitespace()
        .nth(1)
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| vtk_error(ln, "data section needs a count"))?;
    if n != want {
        return Err(vtk_error(ln, format!("data section has {n} tuples, expected {want}")));
    }
    Ok(n)
}

fn numbers<T: std::str::FromStr>(ln: usize, l: &str) -> CliResult<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    l.split_whitespace()
        .map(|t| t.parse::<T>().map_err(|e| vtk_error(ln, format!("`{t}`: {e}"))))
        .collect()
}
