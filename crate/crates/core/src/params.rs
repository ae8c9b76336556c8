//! Physical parameters and quadrature settings.

use crate::geometry::{Mat2, Vec2};
use crate::{Error, Result};

/// Symmetric positive definite hydraulic conductivity tensor K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conductivity(Mat2);

impl Conductivity {
    pub fn new(k11: f64, k12: f64, k22: f64) -> Result<Self> {
        let k = Conductivity(Mat2([[k11, k12], [k12, k22]]));
        let (lo, hi) = k.eigen_bounds();
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(Error::ConductivityNotSpd);
        }
        Ok(k)
    }

    pub fn isotropic(k: f64) -> Result<Self> {
        Conductivity::new(k, 0.0, k)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn inverse(&self) -> Mat2 {
        self.0.inverse()
    }

    /// Smallest and largest eigenvalue (k_min, k_max).
    pub fn eigen_bounds(&self) -> (f64, f64) {
        let [[a, b], [_, d]] = self.0 .0;
        let mean = 0.5 * (a + d);
        let r = libm::sqrt(0.25 * (a - d) * (a - d) + b * b);
        (mean - r, mean + r)
    }

    /// τ·Kτ for a unit tangent τ.
    pub fn tangential(&self, tau: Vec2) -> f64 {
        tau.dot(self.0.mul_vec(tau))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Fluid viscosity ν.
    pub nu: f64,
    /// Product ρg of density and gravity.
    pub rho_g: f64,
    /// Beavers–Joseph–Saffman slip coefficient α.
    pub alpha: f64,
    /// Interface stabilization weight δ.
    pub delta: f64,
    pub conductivity: Conductivity,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            nu: 1.0,
            rho_g: 1.0,
            alpha: 1.0,
            delta: 1.0,
            conductivity: Conductivity(Mat2::IDENTITY),
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::invalid("nu", "viscosity must be positive"));
        }
        if !(self.rho_g > 0.0 && self.rho_g.is_finite()) {
            return Err(Error::invalid("rho_g", "rho*g must be positive"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha", "slip coefficient must be non-negative"));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::invalid("delta", "stabilization weight must be positive"));
        }
        let (lo, hi) = self.conductivity.eigen_bounds();
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(Error::ConductivityNotSpd);
        }
        Ok(())
    }

    /// BJS coefficient α / √(τ·Kτ).
    pub fn slip(&self, tau: Vec2) -> f64 {
        self.alpha / libm::sqrt(self.conductivity.tangential(tau))
    }
}

/// Quadrature exactness used by assembly and by terms involving data or
/// analytic fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureConfig {
    pub triangle: usize,
    pub edge: usize,
    pub data: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { triangle: 4, edge: 4, data: 8 }
    }
}
