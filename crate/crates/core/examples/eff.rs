use sda_core::*;
fn main() {
    let quad = QuadratureConfig::default();
    for name in ["smooth", "layer"] {
        let case = ManufacturedCase::from_name(name).unwrap();
        let mut mesh = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
        for _ in 0..4 {
            let disc = Discretization::new(&mesh, &case, &quad).unwrap();
            let sol = solve(&disc, &SolverOptions::default()).unwrap();
            let e = exact_error(&sol, &case, &quad).unwrap().total;
            let ind = estimate(&sol, &case, &EstimatorConfig::default()).unwrap();
            let (th, z) = (ind.theta(), ind.zeta());
            let tf: Vec<String> = (0..5).map(|k| format!("{:.2e}", ind.term_total(Region::Fluid, k).sqrt())).collect();
            let tp: Vec<String> = (0..5).map(|k| format!("{:.2e}", ind.term_total(Region::Porous, k).sqrt())).collect();
            println!("{name} h {:.4} err {e:.3e} th {th:.3e} z {z:.3e} rel {:.3} eff {:.3} | {} | {}", mesh.h(), e / (th + z), th / (e + z), tf.join(" "), tp.join(" "));
            mesh = mesh::refine_uniform(&mesh).unwrap();
        }
    }
}
