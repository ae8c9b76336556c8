//! Load data and boundary data of a Stokes–Darcy problem.

use crate::geometry::Vec2;
use crate::params::PhysicalParams;

/// Right-hand sides f_f, f_p and the boundary data. Boundary data default to
/// the homogeneous conditions u_f = 0 on Γ_f and u_p·n_p = 0 on Γ_p; other
/// values are imposed by lifting.
pub trait ProblemData {
    fn params(&self) -> &PhysicalParams;

    fn fluid_force(&self, x: Vec2) -> Vec2;

    fn porous_source(&self, x: Vec2) -> f64;

    /// Velocity prescribed on Γ_f.
    fn fluid_boundary_velocity(&self, _x: Vec2) -> Vec2 {
        Vec2::ZERO
    }

    /// Darcy velocity whose normal trace is prescribed on Γ_p.
    fn porous_boundary_velocity(&self, _x: Vec2) -> Vec2 {
        Vec2::ZERO
    }

    /// Prescribed value of `∫_{Ω_f} p + ρg ∫_{Ω_p} φ`. Velocity conditions on
    /// all of ∂Ω leave `(p, φ) = (c, c/ρg)` undetermined; this fixes `c`.
    fn level(&self) -> f64 {
        0.0
    }
}
