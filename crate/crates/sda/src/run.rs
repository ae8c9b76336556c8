use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use sda_core::{
    adapt_loop_with, estimate, exact_error, mesh, solve, Discretization, ManufacturedCase, TwoRegionMesh,
};

use crate::config::{Command, MeshSource, RunConfig};
use crate::error::{CliError, CliResult};
use crate::meshio::{format_mesh, read_mesh};
use crate::report::{fill_rates, write_convergence, write_history, write_indicators, ConvergenceRow};
use crate::vtk::VtkGrid;

/// What a run printed and wrote.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub messages: Vec<String>,
    pub files: Vec<PathBuf>,
}

pub fn load_mesh(source: &MeshSource) -> CliResult<TwoRegionMesh> {
    match source {
        MeshSource::File(path) => read_mesh(path),
        MeshSource::Benchmark { nx, ny } => Ok(TwoRegionMesh::rectangle_benchmark(*nx, *ny)?),
    }
}

pub fn run(config: &RunConfig) -> CliResult<RunSummary> {
    let mesh = load_mesh(&config.mesh)?;
    std::fs::create_dir_all(&config.out).map_err(|e| CliError::io(&config.out, e))?;
    let mut summary = RunSummary::default();
    let case = &config.case;
    let quad = &config.quadrature;
    match config.command {
        Command::Solve | Command::Estimate => {
            let disc = Discretization::new(&mesh, case, quad)?;
            let sol = solve(&disc, &config.adapt.solver)?;
            let err = exact_error(&sol, case, quad)?.total;
            summary.messages.push(format!("ndof {}", disc.num_dofs()));
            summary.messages.push(format!("residual {:e}", sol.residual()));
            summary.messages.push(format!("err_h_norm {err:e}"));
            if config.command == Command::Solve {
                let path = config.out.join("solution.vtk");
                write_text(&path, &VtkGrid::from_solution(&sol)?.to_legacy())?;
                summary.files.push(path);
            } else {
                let ind = estimate(&sol, case, &config.adapt.estimator)?;
                summary.messages.push(format!("theta {:e}", ind.theta()));
                summary.messages.push(format!("zeta {:e}", ind.zeta()));
                let path = config.out.join("indicators.csv");
                write_indicators(create(&path)?, &ind)?;
                summary.files.push(path);
            }
        }
        Command::Adapt => {
            let mut meshes = Vec::new();
            let outcome = adapt_loop_with(&mesh, case, Some(case), &config.adapt, |rec, sol, _| {
                meshes.push((rec.iteration, format_mesh(sol.mesh())));
            })?;
            for (iteration, text) in meshes {
                let path = config.out.join(format!("mesh_{iteration:03}.txt"));
                write_text(&path, &text)?;
                summary.files.push(path);
            }
            let path = config.out.join("history.csv");
            write_history(create(&path)?, &outcome.history)?;
            summary.files.push(path);
            if let Some(last) = outcome.history.last() {
                summary.messages.push(format!(
                    "iterations {} ndof {} theta {:e}",
                    outcome.history.len(),
                    last.ndof,
                    last.theta
                ));
            }
        }
        Command::Convergence => {
            let rows = convergence_study(&mesh, case, config)?;
            for r in &rows {
                summary.messages.push(format!("level {} h {} err_h_norm {:e}", r.level, r.h, r.err_h_norm));
            }
            let path = config.out.join("convergence.csv");
            write_convergence(create(&path)?, &rows)?;
            summary.files.push(path);
        }
    }
    Ok(summary)
}

/// Solves and estimates on `config.levels` uniformly refined meshes starting
/// from `coarse`.
pub fn convergence_study(
    coarse: &TwoRegionMesh,
    case: &ManufacturedCase,
    config: &RunConfig,
) -> CliResult<Vec<ConvergenceRow>> {
    let quad = &config.quadrature;
    let mut mesh = coarse.clone();
    let mut rows = Vec::with_capacity(config.levels);
    for level in 0..config.levels {
        if level > 0 {
            mesh = mesh::refine_uniform(&mesh)?;
        }
        let disc = Discretization::new(&mesh, case, quad)?;
        let sol = solve(&disc, &config.adapt.solver)?;
        let ind = estimate(&sol, case, &config.adapt.estimator)?;
        rows.push(ConvergenceRow {
            level,
            h: mesh.h(),
            ndof: disc.num_dofs(),
            err_h_norm: exact_error(&sol, case, quad)?.total,
            theta: ind.theta(),
            zeta: ind.zeta(),
            rate: None,
        });
    }
    fill_rates(&mut rows);
    Ok(rows)
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
