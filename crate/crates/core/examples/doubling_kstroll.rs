//! k-stroll on a Euclidean point set through the split-tree dynamic program.

use orienteer::doubling::{DoublingSolver, SolverConfig};
use orienteer::metric::MetricInstance;
use orienteer::oracle::exact_kstroll;
use orienteer::rational::Q;
use rand::{Rng, SeedableRng};

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let pts: Vec<Vec<i64>> = (0..10).map(|_| vec![rng.gen_range(0..60), rng.gen_range(0..60)]).collect();
    let m = MetricInstance::from_points(&pts).unwrap();
    let cfg = SolverConfig { eps: Q::new(1, 2), seed: 5, ..SolverConfig::default() };
    let mut solver = DoublingSolver::new(&m, &cfg).unwrap();
    println!("tree {:?}", solver.stats());
    for k in [4, 7, 10] {
        let sol = solver.kstroll(0, 1, k).unwrap();
        let opt = exact_kstroll(&m, 0, 1, k).unwrap();
        println!(
            "k={k}: length {:.3} optimum {:.3} certified {}  {:?}",
            orienteer::rational::to_f64(&m.raw(sol.length)),
            orienteer::rational::to_f64(&m.raw(opt.value)),
            sol.certified,
            sol.walk.vertices()
        );
    }
}
