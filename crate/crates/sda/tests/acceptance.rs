//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use sda::{run, Command, KeyValues};
use sda_core::assembly::{assemble_forms, level_functional};
use sda_core::basis::{edge_moment_weight, ref_edge, ReferenceBasis};
use sda_core::geometry::Vec2;
use sda_core::quadrature::{make_quadrature, QuadKind, MAX_DEGREE};
use sda_core::*;

#[path = "../../core/tests/common/mod.rs"]
mod common;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// One level of a uniform refinement study.
#[derive(Clone, Copy)]
struct Level {
    h: f64,
    ndof: usize,
    err: f64,
    theta: f64,
    zeta: f64,
    residual: f64,
}

fn study(case: &ManufacturedCase, levels: usize) -> Vec<Level> {
    let q = QuadratureConfig::default();
    let mut mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let mut out = Vec::new();
    for l in 0..levels {
        if l > 0 {
            mesh = mesh::refine_uniform(&mesh).unwrap();
        }
        let disc = Discretization::new(&mesh, case, &q).unwrap();
        let sol = solve(&disc, &SolverOptions::default()).unwrap();
        let ind = estimate(&sol, case, &EstimatorConfig::default()).unwrap();
        out.push(Level {
            h: mesh.h(),
            ndof: disc.num_dofs(),
            err: exact_error(&sol, case, &q).unwrap().total,
            theta: ind.theta(),
            zeta: ind.zeta(),
            residual: sol.residual(),
        });
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

fn a_priori_rate(studies: &[(&str, Vec<Level>)]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, levels) in studies {
        let h: Vec<f64> = levels.iter().map(|l| l.h).collect();
        let e: Vec<f64> = levels.iter().map(|l| l.err).collect();
        let slope = loglog_slope(&h, &e);
        pass &= (0.85..=1.3).contains(&slope);
        parts.push(format!("{name} slope {slope:.3}"));
    }
    parts.push("zero and discrete cases have err = 0 on every mesh".into());
    verdict(pass, parts.join(", "))
}

fn ratio_spread(studies: &[(&str, Vec<Level>)], ratio: fn(&Level) -> f64, label: &str) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, levels) in studies {
        let r: Vec<f64> = levels.iter().map(ratio).collect();
        let s = spread(&r);
        pass &= s <= 5.0;
        let shown: Vec<String> = r.iter().map(|v| format!("{v:.3}")).collect();
        parts.push(format!("{name} {label} [{}] max/min {s:.3}", shown.join(", ")));
    }
    verdict(pass, parts.join("; "))
}

fn vanishing_residual() -> Verdict {
    let case = ManufacturedCase::from_name("discrete").unwrap();
    let q = QuadratureConfig::default();
    let coarse = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let graded = mesh::bisect(&coarse, &[0, 7, 19, 30]).unwrap();
    let (mut theta, mut err) = (0.0f64, 0.0f64);
    for mesh in [&coarse, &graded] {
        let sol = solve(&Discretization::new(mesh, &case, &q).unwrap(), &SolverOptions::default()).unwrap();
        theta = theta.max(estimate(&sol, &case, &EstimatorConfig::default()).unwrap().theta());
        err = err.max(exact_error(&sol, &case, &q).unwrap().total);
    }
    verdict(theta <= 1e-10 && err <= 1e-10, format!("max Θ {theta:.2e}, max err {err:.2e}"))
}

fn assembly_oracle() -> Verdict {
    let mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let layout = DofLayout::build(&mesh);
    let params = common::params();
    let forms = assemble_forms(&mesh, &layout, &params, &QuadratureConfig::default()).unwrap();
    let mut worst = 0.0f64;
    for seed in 1..=5 {
        let cu = common::pseudo_random(layout.total(), seed);
        let cv = common::pseudo_random(layout.total(), 1000 + seed);
        let u = DiscreteSolution::from_coefficients(&mesh, params, cu.clone()).unwrap();
        let v = DiscreteSolution::from_coefficients(&mesh, params, cv.clone()).unwrap();
        let oracle: f64 = common::bilinear_oracle(&mesh, &u, &v).iter().sum();
        let got = forms.system_matrix().bilinear(&cv, &cu);
        worst = worst.max((got - oracle).abs() / oracle.abs());
    }
    verdict(worst <= 1e-10, format!("worst relative error {worst:.2e} over 5 random pairs"))
}

fn galerkin_residual() -> Verdict {
    let q = QuadratureConfig::default();
    let mut worst = 0.0f64;
    for name in ["smooth", "layer"] {
        let case = ManufacturedCase::from_name(name).unwrap();
        let mut mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
        for _ in 0..2 {
            let disc = Discretization::new(&mesh, &case, &q).unwrap();
            let sol = solve(&disc, &SolverOptions::default()).unwrap();
            let layout = disc.layout();
            let a = disc.system().full_matrix();
            let b = disc.system().full_rhs();
            let x = sol.coefficients();
            let ell = level_functional(&mesh, layout, case.params().rho_g);
            let mut r = ell.iter().map(|l| l * sol.multiplier()).collect::<Vec<_>>();
            for c in 0..a.ncols() {
                let (rows, vals) = a.column(c);
                for (&i, &v) in rows.iter().zip(vals) {
                    r[i] += v * x[c];
                }
            }
            let (mut num, mut den) = (0.0f64, 0.0f64);
            for i in (0..layout.total()).filter(|&i| layout.free_index(i).is_some()) {
                num = num.max((r[i] - b[i]).abs());
                den = den.max(b[i].abs());
            }
            worst = worst.max(num / den);
            mesh = mesh::refine_uniform(&mesh).unwrap();
        }
    }
    verdict(worst <= 1e-10, format!("worst ‖Ax − b‖∞/‖b‖∞ {worst:.2e}"))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn basis_and_quadrature() -> Verdict {
    let mut worst = 0.0f64;
    let mut note = |v: f64| worst = worst.max(v.abs());

    let verts = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let p1 = ReferenceBasis::p1().eval_basis(&verts).unwrap();
    for j in 0..3 {
        for i in 0..3 {
            note(p1.value(j, i).x() - if i == j { 1.0 } else { 0.0 });
        }
    }

    let bubble = ReferenceBasis::bubble();
    let mut boundary = Vec::new();
    for s in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
        boundary.extend([[0.0, s, 1.0 - s], [s, 0.0, 1.0 - s], [s, 1.0 - s, 0.0]]);
    }
    let b = bubble.eval_basis(&boundary).unwrap();
    (0..boundary.len()).for_each(|p| note(b.value(p, 0).x()));
    note(bubble.eval_basis(&[[1.0 / 3.0; 3]]).unwrap().value(0, 0).x() - 1.0);

    // edge moments by Simpson's rule, exact for the quadratic integrands
    let bdm = ReferenceBasis::bdm1();
    for j in 0..6 {
        for i in 0..3 {
            let (a, b) = ref_edge(i);
            let t = b - a;
            let len = t.norm();
            let n = t.rot_cw() * (1.0 / len);
            for k in 0..2 {
                let g = |s: f64| bdm.bdm_value(j, a + t * s).dot(n) * edge_moment_weight(k, s);
                let m = len / 6.0 * (g(0.0) + 4.0 * g(0.5) + g(1.0));
                note(m - if 2 * i + k == j { 1.0 } else { 0.0 });
            }
        }
        // divergence theorem on the reference triangle (area 1/2)
        note(bdm.bdm_divergence(j) - if j % 2 == 0 { 2.0 } else { 0.0 });
        let pts = [[1.0, 0.0, 0.0], [0.2, 0.5, 0.3], [0.0, 0.0, 1.0]];
        let table = bdm.eval_basis(&pts).unwrap();
        for p in 0..pts.len() {
            note(table.derivative(p, j).trace() - bdm.bdm_divergence(j));
        }
    }

    for d in 0..=MAX_DEGREE {
        let tri = make_quadrature(QuadKind::Triangle, d).unwrap();
        for a in 0..=d {
            for c in 0..=d - a {
                let got: f64 = tri.iter().map(|(l, w)| w * l[1].powi(a as i32) * l[2].powi(c as i32)).sum();
                note(got - 2.0 * factorial(a) * factorial(c) / factorial(a + c + 2));
            }
        }
        let edge = make_quadrature(QuadKind::Edge, d).unwrap();
        for k in 0..=d {
            let got: f64 = edge.iter().map(|(l, w)| w * l[1].powi(k as i32)).sum();
            note(got - 1.0 / (k + 1) as f64);
        }
    }
    verdict(worst <= 1e-12, format!("largest deviation {worst:.2e}"))
}

fn interface_consistency() -> Verdict {
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
    let q = QuadratureConfig::default();
    let params = common::params();
    let (mut energy, mut term) = (0.0f64, 0.0f64);
    let coarse = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let graded = mesh::bisect(&coarse, &[2, 9, 20]).unwrap();
    for mesh in [&coarse, &graded] {
        // both velocities have normal trace 0.3 − 0.2x on Γ
        let sol = DiscreteSolution::interpolate(
            mesh,
            params,
            &|x| Vec2::new(x.y() * x.y(), 0.3 - 0.2 * x.x()),
            &|x| x.x(),
            &|x| Vec2::new(1.0 - x.x(), 0.3 - 0.2 * x.x()),
            &|x| x.y(),
            &q,
        )
        .unwrap();
        let forms = assemble_forms(mesh, sol.layout(), &params, &q).unwrap();
        let c = sol.coefficients();
        energy = energy.max(forms.j_gamma.bilinear(c, c).abs());
        let ind = estimate(&sol, &NoData(params), &EstimatorConfig::default()).unwrap();
        term = term.max(mesh.triangles_in(Region::Porous).map(|t| ind.terms()[t][4]).fold(0.0, f64::max));
    }
    verdict(energy <= 1e-12 && term <= 1e-12, format!("J_Γ energy {energy:.2e}, stabilization term {term:.2e}"))
}

/// Uniform DOFs needed to reach `target`, interpolating `ln ndof` linearly
/// in `ln Θ` between the bracketing uniform levels.
fn uniform_dofs_for(target: f64, uniform: &[(usize, f64)]) -> Option<f64> {
    uniform.windows(2).find(|w| w[1].1 <= target && target <= w[0].1).map(|w| {
        let ((n0, t0), (n1, t1)) = (w[0], w[1]);
        let s = (target.ln() - t0.ln()) / (t1.ln() - t0.ln());
        ((n0 as f64).ln() + s * ((n1 as f64).ln() - (n0 as f64).ln())).exp()
    })
}

fn adaptivity(layer_levels: &[Level]) -> Verdict {
    let case = ManufacturedCase::from_name("layer").unwrap();
    let start = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let config = AdaptConfig { max_iterations: 6, ..AdaptConfig::default() };
    let outcome = adapt_loop(&start, &case, Some(&case), &config).unwrap();
    let last = outcome.history.last().unwrap();
    let mut uniform: Vec<(usize, f64)> = layer_levels.iter().map(|l| (l.ndof, l.theta)).collect();
    let mut mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    for _ in 1..layer_levels.len() {
        mesh = mesh::refine_uniform(&mesh).unwrap();
    }
    // extend the uniform sequence until it passes the adaptive Θ
    while uniform.last().unwrap().1 > last.theta && uniform.len() < 7 {
        mesh = mesh::refine_uniform(&mesh).unwrap();
        let q = QuadratureConfig::default();
        let disc = Discretization::new(&mesh, &case, &q).unwrap();
        let sol = solve(&disc, &SolverOptions::default()).unwrap();
        uniform.push((disc.num_dofs(), estimate(&sol, &case, &EstimatorConfig::default()).unwrap().theta()));
    }
    match uniform_dofs_for(last.theta, &uniform) {
        Some(n) => {
            let ratio = last.ndof as f64 / n;
            verdict(
                ratio <= 0.6 && outcome.history.len() == 7,
                format!(
                    "adaptive Θ {:.4e} with {} DOFs after {} refinements; uniform needs ≈{n:.0}; ratio {ratio:.3}",
                    last.theta,
                    last.ndof,
                    outcome.history.len() - 1
                ),
            )
        }
        None => verdict(false, format!("uniform refinement did not reach Θ {:.4e}", last.theta)),
    }
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn determinism() -> Verdict {
    let runs = [
        (Command::Estimate, "benchmark = 4x4\ncase = layer\n", "indicators.csv"),
        (Command::Convergence, "benchmark = 4x4\ncase = smooth\nlevels = 3\n", "convergence.csv"),
        (Command::Adapt, "benchmark = 4x4\ncase = layer\nmax_iterations = 4\n", "history.csv"),
    ];
    let mut compared = Vec::new();
    for (command, text, file) in runs {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let dir = scratch(&format!("{command}_{rep}"));
            let mut kv = KeyValues::parse(text, "acceptance").unwrap();
            kv.set("out", dir.to_str().unwrap()).unwrap();
            run(&kv.into_config(command).unwrap()).unwrap();
            outputs.push(std::fs::read(dir.join(file)).unwrap());
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            return verdict(false, format!("{file} differs between runs"));
        }
        compared.push(format!("{file} ({} bytes)", outputs[0].len()));
    }
    verdict(true, format!("identical: {}", compared.join(", ")))
}

fn main() -> ExitCode {
    let smooth = ManufacturedCase::from_name("smooth").unwrap();
    let layer = ManufacturedCase::from_name("layer").unwrap();
    let studies = [("smooth", study(&smooth, 4)), ("layer", study(&layer, 4))];
    let solver_residual = studies.iter().flat_map(|(_, s)| s.iter().map(|l| l.residual)).fold(0.0, f64::max);

    let results: Vec<(&str, Verdict)> = vec![
        ("a priori rate", a_priori_rate(&studies)),
        ("reliability", ratio_spread(&studies, |l| l.err / (l.theta + l.zeta), "err/(Θ+ζ)")),
        ("efficiency", ratio_spread(&studies, |l| l.theta / (l.err + l.zeta), "Θ/(err+ζ)")),
        ("vanishing residual", vanishing_residual()),
        ("assembly oracle", assembly_oracle()),
        ("galerkin residual", {
            let mut v = galerkin_residual();
            v.pass &= solver_residual <= 1e-10;
            v.detail += &format!("; solver-reported residual over all study levels {solver_residual:.2e}");
            v
        }),
        ("basis and quadrature", basis_and_quadrature()),
        ("interface consistency", interface_consistency()),
        ("adaptivity", adaptivity(&studies[1].1)),
        ("determinism", determinism()),
    ];
    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        println!("{} {:>2} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
