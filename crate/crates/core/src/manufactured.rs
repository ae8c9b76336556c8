//! Exact solutions of the coupled problem on the unit square with fluid on
//! top, porous medium below and Γ = {y = 1/2}.
//!
//! The smooth cases use a stream function `ψ = cos(πx) b(s)`, `s = y − 1/2`,
//! so `u_f = (cos πx b'(s), π sin πx b(s))` is divergence free. With
//! `K = diag(k₁, k₂)` the head `φ = −(π b(0)/k₂) sin πx · y` makes the normal
//! fluxes match on Γ and vanishes on Γ_p; the pressure
//! `p = ρgφ + 2νπ sin πx b'(s)` satisfies the normal stress balance
//! identically; and `ν(b''(0) + π² b(0)) = α b'(0)/√k₁` is the slip law.
//! Boundary values are not homogeneous and are imposed by lifting.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::geometry::{Mat2, Vec2};
use crate::mesh::{Region, TwoRegionMesh};
use crate::norms::{compute_h_norm, FieldBundle, HNorm};
use crate::params::{PhysicalParams, QuadratureConfig};
use crate::problem::ProblemData;
use crate::solver::DiscreteSolution;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseKind {
    /// Everything zero.
    Zero,
    /// Exact solution in the discrete space: `u_f = (1, 0)`,
    /// `p = c (y − 1/2)`, `u_p = 0`, `φ = 0` (needs α = 0).
    Discrete,
    /// Polynomial-in-y, trigonometric-in-x stream function.
    Smooth,
    /// The smooth case plus a boundary layer of width ε in the fluid along Γ.
    Layer,
}

impl CaseKind {
    pub const ALL: [CaseKind; 4] = [CaseKind::Zero, CaseKind::Discrete, CaseKind::Smooth, CaseKind::Layer];

    pub fn name(self) -> &'static str {
        match self {
            CaseKind::Zero => "zero",
            CaseKind::Discrete => "discrete",
            CaseKind::Smooth => "smooth",
            CaseKind::Layer => "layer",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        CaseKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Parameters the case is shipped with.
    pub fn default_params(self) -> PhysicalParams {
        match self {
            CaseKind::Discrete => PhysicalParams { alpha: 0.0, ..Default::default() },
            CaseKind::Zero => PhysicalParams::default(),
            CaseKind::Smooth | CaseKind::Layer => PhysicalParams { nu: 0.1, ..Default::default() },
        }
    }
}

/// Which interface conditions hold exactly and which boundary data need a
/// lifting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseFlags {
    pub mass_conservation: bool,
    pub normal_stress: bool,
    pub slip: bool,
    pub fluid_lifting: bool,
    pub porous_lifting: bool,
}

/// Default layer width.
pub const LAYER_WIDTH: f64 = 0.02;
/// Pressure slope of the discrete case.
const DISCRETE_SLOPE: f64 = 2.0;

/// Profile `b(s)` with derivatives up to third order.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Profile {
    c: [f64; 3],
    layer: Option<f64>,
}

impl Profile {
    /// `[b, b', b'', b''']` at `s`.
    fn eval(&self, s: f64) -> [f64; 4] {
        let [c0, c1, c2] = self.c;
        let mut b = [c0 + s * (c1 + s * c2), c1 + 2.0 * c2 * s, 2.0 * c2, 0.0];
        if let Some(eps) = self.layer {
            // ε g(s/ε) with g(t) = t − 3 + e^{−t}(3 + 2t + t²/2): g, g', g''
            // vanish at 0 so the interface conditions are untouched
            let t = s / eps;
            let e = libm::exp(-t);
            b[0] += eps * (t - 3.0 + e * (3.0 + 2.0 * t + 0.5 * t * t));
            b[1] += 1.0 - e * (1.0 + t + 0.5 * t * t);
            b[2] += e * 0.5 * t * t / eps;
            b[3] += e * (t - 0.5 * t * t) / (eps * eps);
        }
        b
    }
}

/// A manufactured solution together with its data.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedCase {
    kind: CaseKind,
    params: PhysicalParams,
    profile: Profile,
    k1: f64,
    k2: f64,
    head_shift: f64,
}

impl ManufacturedCase {
    pub fn new(kind: CaseKind, params: PhysicalParams) -> Result<Self> {
        params.validate()?;
        let k = params.conductivity.matrix();
        if k.0[0][1] != 0.0 {
            return Err(Error::invalid("conductivity", "manufactured cases need a diagonal K"));
        }
        let (k1, k2) = (k.0[0][0], k.0[1][1]);
        if kind == CaseKind::Discrete && params.alpha != 0.0 {
            return Err(Error::invalid("alpha", "the discrete case needs alpha = 0"));
        }
        let (c0, c1) = match kind {
            CaseKind::Zero | CaseKind::Discrete => (0.0, 0.0),
            CaseKind::Smooth | CaseKind::Layer => (1.0 / (PI * PI), 1.0),
        };
        let c2 = (params.alpha * c1 / libm::sqrt(k1) - params.nu * PI * PI * c0) / (2.0 * params.nu);
        let layer = (kind == CaseKind::Layer).then_some(LAYER_WIDTH);
        Ok(ManufacturedCase { kind, params, profile: Profile { c: [c0, c1, c2], layer }, k1, k2, head_shift: 0.0 })
    }

    pub fn from_name(name: &str) -> Result<Self> {
        let kind = CaseKind::from_name(name)
            .ok_or_else(|| Error::invalid("case", alloc::format!("unknown case `{name}`")))?;
        Self::new(kind, kind.default_params())
    }

    pub fn kind(&self) -> CaseKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Copy with the head shifted by a constant, which breaks the normal
    /// stress balance on Γ; for negative tests.
    pub fn with_head_shift(&self, shift: f64) -> Self {
        ManufacturedCase { head_shift: shift, ..self.clone() }
    }

    pub fn flags(&self) -> CaseFlags {
        let lifted = !matches!(self.kind, CaseKind::Zero);
        CaseFlags {
            mass_conservation: true,
            normal_stress: self.head_shift == 0.0,
            slip: true,
            fluid_lifting: lifted,
            porous_lifting: matches!(self.kind, CaseKind::Smooth | CaseKind::Layer),
        }
    }

    fn head_scale(&self) -> f64 {
        -PI * self.profile.c[0] / self.k2
    }

    pub fn u_f(&self, x: Vec2) -> Vec2 {
        if self.kind == CaseKind::Discrete {
            return Vec2::new(1.0, 0.0);
        }
        let b = self.profile.eval(x.y() - 0.5);
        let (s, c) = (libm::sin(PI * x.x()), libm::cos(PI * x.x()));
        Vec2::new(c * b[1], PI * s * b[0])
    }

    /// Jacobian of `u_f`, row = component.
    pub fn grad_u_f(&self, x: Vec2) -> Mat2 {
        if self.kind == CaseKind::Discrete {
            return Mat2::ZERO;
        }
        let b = self.profile.eval(x.y() - 0.5);
        let (s, c) = (libm::sin(PI * x.x()), libm::cos(PI * x.x()));
        Mat2([[-PI * s * b[1], c * b[2]], [PI * PI * c * b[0], PI * s * b[1]]])
    }

    /// `∇·D(u_f)`.
    pub fn div_sym_grad_u_f(&self, x: Vec2) -> Vec2 {
        if self.kind == CaseKind::Discrete {
            return Vec2::ZERO;
        }
        // u_f is divergence free, so 2∇·D(u_f) = Δu_f
        let b = self.profile.eval(x.y() - 0.5);
        let (s, c) = (libm::sin(PI * x.x()), libm::cos(PI * x.x()));
        Vec2::new(c * (b[3] - PI * PI * b[1]), PI * s * (b[2] - PI * PI * b[0])) * 0.5
    }

    pub fn p(&self, x: Vec2) -> f64 {
        if self.kind == CaseKind::Discrete {
            return DISCRETE_SLOPE * (x.y() - 0.5);
        }
        let b = self.profile.eval(x.y() - 0.5);
        let s = libm::sin(PI * x.x());
        self.params.rho_g * self.head_scale() * s * x.y() + 2.0 * self.params.nu * PI * s * b[1]
    }

    pub fn grad_p(&self, x: Vec2) -> Vec2 {
        if self.kind == CaseKind::Discrete {
            return Vec2::new(0.0, DISCRETE_SLOPE);
        }
        let b = self.profile.eval(x.y() - 0.5);
        let (s, c) = (libm::sin(PI * x.x()), libm::cos(PI * x.x()));
        let rg = self.params.rho_g * self.head_scale();
        let tn = 2.0 * self.params.nu * PI;
        Vec2::new(rg * PI * c * x.y() + tn * PI * c * b[1], rg * s + tn * s * b[2])
    }

    pub fn phi(&self, x: Vec2) -> f64 {
        self.head_scale() * libm::sin(PI * x.x()) * x.y() + self.head_shift
    }

    pub fn grad_phi(&self, x: Vec2) -> Vec2 {
        let a = self.head_scale();
        Vec2::new(a * PI * libm::cos(PI * x.x()) * x.y(), a * libm::sin(PI * x.x()))
    }

    /// `u_p = −K∇φ`.
    pub fn u_p(&self, x: Vec2) -> Vec2 {
        let g = self.grad_phi(x);
        Vec2::new(-self.k1 * g.x(), -self.k2 * g.y())
    }

    pub fn grad_u_p(&self, x: Vec2) -> Mat2 {
        let a = self.head_scale();
        let (s, c) = (libm::sin(PI * x.x()), libm::cos(PI * x.x()));
        Mat2([[self.k1 * a * PI * PI * s * x.y(), -self.k1 * a * PI * c], [-self.k2 * a * PI * c, 0.0]])
    }

    pub fn div_u_p(&self, x: Vec2) -> f64 {
        self.grad_u_p(x).trace()
    }

    /// `f_f = −2ν∇·D(u_f) + ∇p`.
    pub fn f_f(&self, x: Vec2) -> Vec2 {
        self.grad_p(x) - self.div_sym_grad_u_f(x) * (2.0 * self.params.nu)
    }

    /// `f_p = ∇·u_p`.
    pub fn f_p(&self, x: Vec2) -> f64 {
        self.div_u_p(x)
    }

    /// Exact `∫_{Ω_f} p + ρg ∫_{Ω_p} φ`.
    pub fn exact_level(&self) -> f64 {
        let rg = self.params.rho_g;
        match self.kind {
            CaseKind::Discrete => DISCRETE_SLOPE / 8.0 + rg * 0.5 * self.head_shift,
            _ => {
                // ∫₀¹ sin πx dx = 2/π; ∫_{1/2}^1 y dy = 3/8, ∫_0^{1/2} y dy = 1/8
                let a = self.head_scale();
                let db = self.profile.eval(0.5)[0] - self.profile.eval(0.0)[0];
                let fluid = rg * a * (2.0 / PI) * 0.375 + 2.0 * self.params.nu * PI * (2.0 / PI) * db;
                let porous = rg * (a * (2.0 / PI) * 0.125 + 0.5 * self.head_shift);
                fluid + porous
            }
        }
    }
}

impl ProblemData for ManufacturedCase {
    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn fluid_force(&self, x: Vec2) -> Vec2 {
        self.f_f(x)
    }

    fn porous_source(&self, x: Vec2) -> f64 {
        self.f_p(x)
    }

    fn fluid_boundary_velocity(&self, x: Vec2) -> Vec2 {
        self.u_f(x)
    }

    fn porous_boundary_velocity(&self, x: Vec2) -> Vec2 {
        self.u_p(x)
    }

    fn level(&self) -> f64 {
        self.exact_level()
    }
}

impl FieldBundle for ManufacturedCase {
    fn fluid_velocity(&self, _t: usize, _l: &[f64; 3], x: Vec2) -> Result<(Vec2, Mat2)> {
        Ok((self.u_f(x), self.grad_u_f(x)))
    }

    fn pressure(&self, _t: usize, _l: &[f64; 3], x: Vec2) -> Result<f64> {
        Ok(self.p(x))
    }

    fn darcy_velocity(&self, _t: usize, _l: &[f64; 3], x: Vec2) -> Result<(Vec2, f64)> {
        Ok((self.u_p(x), self.div_u_p(x)))
    }

    fn head(&self, _t: usize, _l: &[f64; 3], x: Vec2) -> Result<f64> {
        Ok(self.phi(x))
    }
}

/// Largest violation of each defining condition found by [`verify_case`].
#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    pub violations: Vec<(&'static str, f64)>,
    pub samples: usize,
}

impl CaseReport {
    pub fn max_violation(&self) -> f64 {
        self.violations.iter().fold(0.0f64, |m, v| m.max(v.1))
    }

    pub fn get(&self, condition: &str) -> Option<f64> {
        self.violations.iter().find(|v| v.0 == condition).map(|v| v.1)
    }
}

/// Relative step of the finite-difference checks and their tolerance.
const FD_STEP: f64 = 1e-5;
const FD_TOLERANCE: f64 = 1e-5;

/// Samples the interface conditions, Darcy's law, the mass balance and the
/// boundary data against closed forms (tolerance `tol`), and the momentum
/// equation and all derivative formulas against central finite differences
/// (relative tolerance 1e-5). Fails with the first condition over its bound.
pub fn verify_case(case: &ManufacturedCase, tol: f64) -> Result<CaseReport> {
    let n = 1000;
    let p = &case.params;
    let nf = Vec2::new(0.0, -1.0);
    let tau = Vec2::new(1.0, 0.0);
    let slip = p.slip(tau);
    let mut v = [0.0f64; 9];
    const NAMES: [&str; 9] = [
        "mass_conservation",
        "normal_stress",
        "slip",
        "darcy_law",
        "porous_mass_balance",
        "fluid_incompressibility",
        "fluid_momentum",
        "derivatives",
        "boundary_data",
    ];
    let upd = |v: &mut [f64; 9], i: usize, x: f64| v[i] = v[i].max(x.abs());
    let mut scale = 1.0f64;
    // interface
    for i in 0..n {
        let x = Vec2::new((i as f64 + 0.5) / n as f64, 0.5);
        let d = case.grad_u_f(x).sym();
        let ndn = nf.dot(d.mul_vec(nf));
        let ndt = nf.dot(d.mul_vec(tau));
        upd(&mut v, 0, case.u_f(x).dot(nf) + case.u_p(x).dot(-nf));
        upd(&mut v, 1, case.p(x) - 2.0 * p.nu * ndn - p.rho_g * case.phi(x));
        upd(&mut v, 2, -2.0 * p.nu * ndt - slip * case.u_f(x).dot(tau));
    }
    // interior points of both regions (a 32×32 lattice per region)
    let m = 32;
    let mut samples = n;
    for region in [Region::Fluid, Region::Porous] {
        for i in 0..m {
            for j in 0..m {
                let y0 = if region == Region::Fluid { 0.5 } else { 0.0 };
                let x = Vec2::new((i as f64 + 0.5) / m as f64, y0 + 0.5 * (j as f64 + 0.37) / m as f64);
                samples += 1;
                match region {
                    Region::Porous => {
                        let g = case.grad_phi(x);
                        let darcy = case.u_p(x) + Vec2::new(case.k1 * g.x(), case.k2 * g.y());
                        upd(&mut v, 3, darcy.norm());
                        upd(&mut v, 4, case.div_u_p(x) - case.f_p(x));
                        fd_check(&mut v[7], &mut scale, x, |y| case.phi(y), |y| case.grad_phi(y));
                        for c in 0..2 {
                            fd_check(&mut v[7], &mut scale, x, |y| case.u_p(y).0[c], |y| row(case.grad_u_p(y), c));
                        }
                    }
                    Region::Fluid => {
                        upd(&mut v, 5, case.grad_u_f(x).trace());
                        for c in 0..2 {
                            fd_check(&mut v[7], &mut scale, x, |y| case.u_f(y).0[c], |y| row(case.grad_u_f(y), c));
                        }
                        fd_check(&mut v[7], &mut scale, x, |y| case.p(y), |y| case.grad_p(y));
                        // ∇·D(u_f) by differencing the analytic Jacobian
                        let h = FD_STEP;
                        let mut div = [0.0; 2];
                        for j in 0..2 {
                            let mut e = Vec2::ZERO;
                            e.0[j] = h;
                            let dp = case.grad_u_f(x + e).sym();
                            let dm = case.grad_u_f(x - e).sym();
                            for i in 0..2 {
                                div[i] += (dp.0[i][j] - dm.0[i][j]) / (2.0 * h);
                            }
                        }
                        let div = Vec2::new(div[0], div[1]);
                        let r = case.f_f(x) + div * (2.0 * p.nu) - case.grad_p(x);
                        scale = scale.max(case.f_f(x).norm());
                        v[6] = v[6].max(r.norm());
                    }
                }
            }
        }
    }
    // boundary data agree with the fields (the lifting uses them)
    for i in 0..=n / 4 {
        let s = i as f64 / (n / 4) as f64;
        for x in [Vec2::new(0.0, 0.5 + 0.5 * s), Vec2::new(1.0, 0.5 + 0.5 * s), Vec2::new(s, 1.0)] {
            upd(&mut v, 8, (case.fluid_boundary_velocity(x) - case.u_f(x)).norm());
        }
        for x in [Vec2::new(0.0, 0.5 * s), Vec2::new(1.0, 0.5 * s), Vec2::new(s, 0.0)] {
            upd(&mut v, 8, (case.porous_boundary_velocity(x) - case.u_p(x)).norm());
        }
    }
    let report = CaseReport { violations: NAMES.iter().copied().zip(v).collect(), samples };
    for (i, &(name, val)) in report.violations.iter().enumerate() {
        let bound = if i == 6 || i == 7 { FD_TOLERANCE * scale } else { tol };
        if !(val <= bound) {
            return Err(Error::CaseViolation { condition: name, max_violation: val });
        }
    }
    Ok(report)
}

fn row(m: Mat2, c: usize) -> Vec2 {
    Vec2(m.0[c])
}

fn fd_check(
    worst: &mut f64,
    scale: &mut f64,
    x: Vec2,
    f: impl Fn(Vec2) -> f64,
    grad: impl Fn(Vec2) -> Vec2,
) {
    let h = FD_STEP;
    let g = grad(x);
    *scale = scale.max(g.norm());
    for j in 0..2 {
        let mut e = Vec2::ZERO;
        e.0[j] = h;
        let fd = (f(x + e) - f(x - e)) / (2.0 * h);
        *worst = worst.max((fd - g.0[j]).abs());
    }
}

/// `‖U − U_h‖_h` with every contribution, integrated at the data degree.
pub fn exact_error(
    sol: &DiscreteSolution<'_>,
    case: &ManufacturedCase,
    quad: &QuadratureConfig,
) -> Result<HNorm> {
    compute_h_norm(sol.mesh(), sol, case, quad)
}

/// Interpolant of the exact solution (nodal, edge moments, element means).
pub fn interpolant<'m>(
    mesh: &'m TwoRegionMesh,
    case: &ManufacturedCase,
    quad: &QuadratureConfig,
) -> Result<DiscreteSolution<'m>> {
    DiscreteSolution::interpolate(
        mesh,
        case.params,
        &|x| case.u_f(x),
        &|x| case.p(x),
        &|x| case.u_p(x),
        &|x| case.phi(x),
        quad,
    )
}
