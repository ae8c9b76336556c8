//! Stabilized fully-mixed finite elements for stationary Stokes–Darcy flow.
//!
//! The fluid region uses MINI elements (P1 + cubic bubble velocity, P1
//! pressure); the porous region uses BDM1 Darcy velocity and a piecewise
//! constant piezometric head. The two are coupled through the
//! Beavers–Joseph–Saffman interface conditions, with an interface penalty on
//! the jump of the normal velocity. On top of the discretization sit a
//! residual a posteriori error estimator, a Dörfler-marked adaptive loop with
//! newest-vertex bisection, and a library of manufactured solutions.
//!
//! The crate is `no_std` (it needs `alloc`); IO and the command-line driver
//! live in the companion `sda` crate.

#![cfg_attr(not(test), no_std)]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

pub mod adaptivity;
pub mod assembly;
pub mod basis;
pub mod dense;
pub mod dofs;
pub(crate) mod element;
mod error;
pub mod estimator;
pub mod geometry;
pub mod manufactured;
pub mod mesh;
pub mod norms;
pub mod params;
pub mod problem;
pub mod quadrature;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};

pub use dofs::{DofLayout, Field};
pub use mesh::{EdgeClass, Region, TwoRegionMesh};
pub use params::{Conductivity, PhysicalParams, QuadratureConfig};
pub use problem::ProblemData;
pub use solver::{solve, Discretization, DiscreteSolution, SolverOptions};
pub use adaptivity::{adapt_loop, adapt_loop_with, mark, AdaptConfig, AdaptHistory, AdaptOutcome, AdaptRecord};
pub use assembly::{assemble, CoupledSystem};
pub use estimator::{estimate, EstimatorConfig, IndicatorField};
pub use norms::{compute_h_norm, FieldBundle, HNorm};
pub use manufactured::{exact_error, verify_case, CaseKind, ManufacturedCase};
