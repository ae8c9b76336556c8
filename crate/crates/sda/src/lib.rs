//! File formats, run configuration and command drivers for `sda-core`.
//!
//! The `sda` binary wraps [`run()`]; everything it writes can also be produced
//! from library code.

pub mod config;
pub mod error;
pub mod meshio;
pub mod report;
pub mod run;
pub mod vtk;

pub use config::{Command, KeyValues, MeshSource, RunConfig};
pub use error::{CliError, CliResult};
pub use run::{convergence_study, load_mesh, run, RunSummary};
