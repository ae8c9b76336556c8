use sda_core::*;
fn main() {
    let quad = QuadratureConfig::default();
    let case = ManufacturedCase::from_name("layer").unwrap();
    let m0 = TwoRegionMesh::rectangle_benchmark(4, 4).unwrap();
    let t = std::time::Instant::now();
    let out = adapt_loop(&m0, &case, Some(&case), &AdaptConfig::default()).unwrap();
    for r in &out.history.records { println!("adapt {} ndof {} th {:.3e} err {:.3e} eff {:.3}", r.iteration, r.ndof, r.theta, r.err_h_norm.unwrap(), r.effectivity.unwrap()); }
    println!("{:?}", t.elapsed());
    let mut mesh = m0.clone();
    for _ in 0..4 {
        let disc = Discretization::new(&mesh, &case, &quad).unwrap();
        let sol = solve(&disc, &SolverOptions::default()).unwrap();
        let ind = estimate(&sol, &case, &EstimatorConfig::default()).unwrap();
        println!("uniform ndof {} th {:.3e}", disc.num_dofs(), ind.theta());
        mesh = mesh::refine_uniform(&mesh).unwrap();
    }
}
