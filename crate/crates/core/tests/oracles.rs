//! Checks against independently computed reference values.

use sda_core::assembly::{assemble_forms, level_functional};
use sda_core::geometry::{Mat2, Vec2};
use sda_core::manufactured::interpolant;
use sda_core::norms::ZeroFields;
use sda_core::*;

mod common;
use common::*;

#[test]
fn assembled_forms_match_direct_integration() {
    let mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let layout = DofLayout::build(&mesh);
    let forms = assemble_forms(&mesh, &layout, &params(), &QuadratureConfig::default()).unwrap();
    for seed in 1..4 {
        let cu = pseudo_random(layout.total(), seed);
        let cv = pseudo_random(layout.total(), 100 + seed);
        let u = DiscreteSolution::from_coefficients(&mesh, params(), cu.clone()).unwrap();
        let v = DiscreteSolution::from_coefficients(&mesh, params(), cv.clone()).unwrap();
        let oracle = bilinear_oracle(&mesh, &u, &v);
        let parts = [
            forms.a_f.bilinear(&cv, &cu),
            forms.bjs.bilinear(&cv, &cu),
            forms.b_f.bilinear(&cv, &cu) - forms.b_f.bilinear(&cu, &cv),
            forms.a_p.bilinear(&cv, &cu),
            forms.b_p.bilinear(&cv, &cu) - forms.b_p.bilinear(&cu, &cv),
            forms.c_gamma.bilinear(&cv, &cu),
            forms.j_gamma.bilinear(&cv, &cu),
        ];
        let scale: f64 = oracle.iter().map(|v| v.abs()).sum();
        for (k, (a, b)) in parts.iter().zip(&oracle).enumerate() {
            assert!((a - b).abs() <= 1e-10 * scale, "form {k}: {a} vs {b}");
        }
        let total = forms.system_matrix().bilinear(&cv, &cu);
        let expect: f64 = oracle.iter().sum();
        assert!((total - expect).abs() <= 1e-10 * scale, "{total} vs {expect}");
    }
}

/// Fields whose norms are simple polynomial integrals.
struct Polynomial;

impl FieldBundle for Polynomial {
    fn fluid_velocity(&self, _t: usize, _l: &[f64; 3], x: Vec2) -> Result<(Vec2, Mat2)> {
        Ok((Vec2::new(x.y(), 0.0), Mat2([[0.0, 1.0], [0.0, 0.0]])))
    }
    fn pressure(&self, _t: usize, _l: &[f64; 3], x: Vec2) -> Result<f64> {
        Ok(x.x())
    }
    fn darcy_velocity(&self, _t: usize, _l: &[f64; 3], x: Vec2) -> Result<(Vec2, f64)> {
        Ok((x, 2.0))
    }
    fn head(&self, _t: usize, _l: &[f64; 3], _x: Vec2) -> Result<f64> {
        Ok(1.0)
    }
}

#[test]
fn norm_of_polynomial_fields_matches_closed_form() {
    let mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let n = compute_h_norm(&mesh, &Polynomial, &ZeroFields, &QuadratureConfig::default()).unwrap();
    // ∫_{1/2}^1 y² dy + |Ω_f|
    assert!((n.fluid_velocity - 19.0 / 24.0).abs() < 1e-14);
    assert!((n.pressure - 1.0 / 6.0).abs() < 1e-14);
    // ∫(x² + y²) over [0,1]×[0,1/2] plus 4|Ω_p|
    assert!((n.darcy_velocity - (5.0 / 24.0 + 2.0)).abs() < 1e-14);
    assert!((n.head - 0.5).abs() < 1e-14);
    // jump (0 − x)·(0, −1) = y = 1/2 on Γ
    assert!((n.interface - 0.25 / mesh.h()).abs() < 1e-14);
}

/// Tensor Gauss–Legendre rule on a rectangle, nodes computed by Newton.
fn rectangle_rule(x0: f64, x1: f64, y0: f64, y1: f64, n: usize) -> Vec<(Vec2, f64)> {
    let mut nodes = Vec::new();
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes.push((z, 2.0 / ((1.0 - z * z) * dp * dp)));
    }
    let mut out = Vec::new();
    for &(zx, wx) in &nodes {
        for &(zy, wy) in &nodes {
            let x = Vec2::new(x0 + (x1 - x0) * (zx + 1.0) / 2.0, y0 + (y1 - y0) * (zy + 1.0) / 2.0);
            out.push((x, wx * wy * (x1 - x0) * (y1 - y0) / 4.0));
        }
    }
    out
}

#[test]
fn norm_of_manufactured_solution_matches_tensor_quadrature() {
    let mesh = TwoRegionMesh::rectangle_benchmark(8, 8).unwrap();
    for name in ["smooth", "layer"] {
        let case = ManufacturedCase::from_name(name).unwrap();
        let cfg = QuadratureConfig { data: 12, ..Default::default() };
        let n = compute_h_norm(&mesh, &case, &ZeroFields, &cfg).unwrap();
        // layer profile needs many points in y
        let fluid = rectangle_rule(0.0, 1.0, 0.5, 1.0, 60);
        let porous = rectangle_rule(0.0, 1.0, 0.0, 0.5, 60);
        let (mut fv, mut pr, mut dv, mut hd) = (0.0, 0.0, 0.0, 0.0);
        for &(x, w) in &fluid {
            let (u, g) = (case.u_f(x), case.grad_u_f(x));
            fv += w * (u.dot(u) + g.ddot(&g));
            pr += w * case.p(x).powi(2);
        }
        for &(x, w) in &porous {
            let u = case.u_p(x);
            dv += w * (u.dot(u) + case.div_u_p(x).powi(2));
            hd += w * case.phi(x).powi(2);
        }
        // the exact solution satisfies the mass balance, so no Γ jump
        assert!(n.interface < 1e-20, "{}", n.interface);
        // refinement of the 8×8 mesh resolves the layer only roughly
        let tol = if name == "layer" { 1e-4 } else { 1e-10 };
        for (a, b) in [(n.fluid_velocity, fv), (n.pressure, pr), (n.darcy_velocity, dv), (n.head, hd)] {
            assert!((a - b).abs() <= tol * b.abs(), "{name}: {a} vs {b}");
        }
    }
}

#[test]
fn exact_level_matches_quadrature() {
    for name in ["smooth", "layer", "discrete"] {
        let case = ManufacturedCase::from_name(name).unwrap().with_head_shift(0.25);
        let rg = case.params().rho_g;
        let mut q = 0.0;
        for (x, w) in rectangle_rule(0.0, 1.0, 0.5, 1.0, 60) {
            q += w * case.p(x);
        }
        for (x, w) in rectangle_rule(0.0, 1.0, 0.0, 0.5, 60) {
            q += w * rg * case.phi(x);
        }
        assert!((case.exact_level() - q).abs() < 1e-12, "{name}: {} vs {q}", case.exact_level());
    }
}

#[test]
fn galerkin_residual_is_small() {
    let mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let case = ManufacturedCase::from_name("smooth").unwrap();
    let quad = QuadratureConfig::default();
    let disc = Discretization::new(&mesh, &case, &quad).unwrap();
    let sol = solve(&disc, &SolverOptions::default()).unwrap();
    let sys = disc.system();
    let layout = disc.layout();
    let x = sol.coefficients();
    // full matrix times full vector, compared with the load on free rows only
    let a = sys.full_matrix();
    let mut ax = vec![0.0; layout.total()];
    for c in 0..a.ncols() {
        let (rows, vals) = a.column(c);
        for (&r, &v) in rows.iter().zip(vals) {
            ax[r] += v * x[c];
        }
    }
    let ell = level_functional(&mesh, layout, case.params().rho_g);
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 0..layout.total() {
        if layout.free_index(i).is_some() {
            let r = ax[i] + ell[i] * sol.multiplier() - sys.full_rhs()[i];
            num = num.max(r.abs());
            den = den.max(sys.full_rhs()[i].abs());
        }
    }
    assert!(num <= 1e-10 * den, "residual {num} / {den}");
    let level: f64 = ell.iter().zip(x).map(|(l, x)| l * x).sum();
    assert!((level - case.exact_level()).abs() < 1e-10);
}

#[test]
fn darcy_normal_component_is_continuous() {
    let mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let mesh = mesh::bisect(&mesh, &[3, 17, 20]).unwrap();
    let case = ManufacturedCase::from_name("smooth").unwrap();
    let disc = Discretization::new(&mesh, &case, &QuadratureConfig::default()).unwrap();
    let sol = solve(&disc, &SolverOptions::default()).unwrap();
    let mut checked = 0;
    for e in mesh.edges_of_class(EdgeClass::InteriorPorous) {
        let [t0, t1] = mesh.edge_triangles(e);
        let [a, b] = mesh.edge(e);
        let n = mesh.edge_normal(e);
        for s in [0.0, 0.3, 0.71, 1.0] {
            let x = mesh.vertex(a) * (1.0 - s) + mesh.vertex(b) * s;
            let u0 = sol.darcy_velocity(t0, &barycentric(mesh.triangle_coords(t0), x)).unwrap().0;
            let u1 = sol.darcy_velocity(t1, &barycentric(mesh.triangle_coords(t1), x)).unwrap().0;
            assert!((u0.dot(n) - u1.dot(n)).abs() < 1e-12, "edge {e}");
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn matched_normal_traces_give_no_interface_penalty() {
    let mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let layout = DofLayout::build(&mesh);
    let q = QuadratureConfig::default();
    // both velocities have normal trace −(0.3 + x·0) on Γ
    let sol = DiscreteSolution::interpolate(
        &mesh,
        params(),
        &|x| Vec2::new(x.y(), 0.3 + 0.0 * x.x()),
        &|_| 0.0,
        &|x| Vec2::new(1.0 - x.x(), 0.3),
        &|_| 0.0,
        &q,
    )
    .unwrap();
    let forms = assemble_forms(&mesh, &layout, &params(), &q).unwrap();
    let c = sol.coefficients();
    let energy = forms.j_gamma.bilinear(c, c);
    assert!(energy.abs() < 1e-12, "{energy}");
    struct NoData(PhysicalParams);
    impl ProblemData for NoData {
        fn params(&self) -> &PhysicalParams {
            &self.0
        }
        fn fluid_force(&self, _x: Vec2) -> Vec2 {
            Vec2::ZERO
        }
        fn porous_source(&self, _x: Vec2) -> f64 {
            0.0
        }
    }
    let ind = estimate(&sol, &NoData(params()), &EstimatorConfig::default()).unwrap();
    for t in mesh.triangles_in(Region::Porous) {
        assert!(ind.terms()[t][4] < 1e-12, "{}", ind.terms()[t][4]);
    }
}

#[test]
fn repeated_solves_are_bitwise_identical() {
    let mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let mesh = mesh::refine_uniform(&mesh).unwrap();
    let case = ManufacturedCase::from_name("layer").unwrap();
    let q = QuadratureConfig::default();
    let run = || {
        let disc = Discretization::new(&mesh, &case, &q).unwrap();
        let sol = solve(&disc, &SolverOptions::default()).unwrap();
        let ind = estimate(&sol, &case, &EstimatorConfig::default()).unwrap();
        (sol.coefficients().to_vec(), ind.theta_sq().to_vec())
    };
    let (a, b) = (run(), run());
    assert!(a.0.iter().zip(&b.0).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert!(a.1.iter().zip(&b.1).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn interpolant_of_discrete_case_solves_the_system() {
    let mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let case = ManufacturedCase::from_name("discrete").unwrap();
    let q = QuadratureConfig::default();
    let disc = Discretization::new(&mesh, &case, &q).unwrap();
    let sol = solve(&disc, &SolverOptions::default()).unwrap();
    let exact = interpolant(&mesh, &case, &q).unwrap();
    let diff = sol
        .coefficients()
        .iter()
        .zip(exact.coefficients())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(diff < 1e-10, "{diff}");
}
