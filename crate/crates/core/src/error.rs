use core::fmt;

use crate::dofs::Field;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter or argument failed validation; `what` names it.
    InvalidInput { what: &'static str, detail: alloc::string::String },
    /// An edge is shared by more than two triangles.
    NonConformingEdge { edge: (usize, usize), neighbors: usize },
    /// A vertex lies in the interior of an edge of a neighbouring triangle.
    HangingVertex { vertex: usize },
    /// A triangle has (numerically) zero area.
    DegenerateTriangle { triangle: usize },
    /// The mesh violates a structural invariant.
    MeshInvariant(&'static str),
    /// Conductivity tensor is not symmetric positive definite on an element.
    ConductivityNotSpd,
    /// Quadrature of the requested exactness is not available.
    UnsupportedQuadrature { degree: usize },
    /// A reference point lies outside the reference triangle.
    PointOutsideReference,
    /// A field was evaluated on an element of the wrong region.
    RegionMismatch { field: Field, element: usize },
    /// Sparse factorization met a zero pivot.
    SingularMatrix { column: usize, block: Option<Field> },
    /// Post-solve residual check failed.
    ResidualTooLarge { relative: f64 },
    /// Two operands live on different meshes.
    MeshMismatch,
    /// A manufactured case violates one of its defining conditions.
    CaseViolation { condition: &'static str, max_violation: f64 },
    /// The adaptive loop failed while solving at the given iteration.
    AdaptFailure { iteration: usize, source: alloc::boxed::Box<Error> },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, detail: impl Into<alloc::string::String>) -> Self {
        Error::InvalidInput { what, detail: detail.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput { what, detail } => write!(f, "invalid {what}: {detail}"),
            Error::NonConformingEdge { edge, neighbors } => write!(
                f,
                "edge ({}, {}) is shared by {neighbors} triangles",
                edge.0, edge.1
            ),
            Error::HangingVertex { vertex } => write!(f, "hanging vertex {vertex}"),
            Error::DegenerateTriangle { triangle } => {
                write!(f, "triangle {triangle} has zero area")
            }
            Error::MeshInvariant(msg) => write!(f, "mesh invariant violated: {msg}"),
            Error::ConductivityNotSpd => write!(f, "conductivity tensor is not SPD"),
            Error::UnsupportedQuadrature { degree } => {
                write!(f, "no quadrature rule of degree {degree}")
            }
            Error::PointOutsideReference => write!(f, "point outside the reference triangle"),
            Error::RegionMismatch { field, element } => {
                write!(f, "field {field} is not defined on element {element}")
            }
            Error::SingularMatrix { column, block } => match block {
                Some(b) => write!(f, "zero pivot at column {column} ({b} block)"),
                None => write!(f, "zero pivot at column {column}"),
            },
            Error::ResidualTooLarge { relative } => {
                write!(f, "relative residual {relative:e} above tolerance")
            }
            Error::MeshMismatch => write!(f, "operands live on different meshes"),
            Error::CaseViolation { condition, max_violation } => {
                write!(f, "condition {condition} violated by {max_violation:e}")
            }
            Error::AdaptFailure { iteration, source } => {
                write!(f, "adaptive iteration {iteration}: {source}")
            }
        }
    }
}

impl core::error::Error for Error {}
