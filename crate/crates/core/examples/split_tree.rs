//! Random hierarchical decomposition of a point set, with portals.

use orienteer::doubling::{build_tree, SolverConfig};
use orienteer::metric::MetricInstance;

fn main() {
    let pts: Vec<Vec<i64>> = (0..10).map(|i| vec![(i * 37) % 50, (i * 11) % 23]).collect();
    let m = MetricInstance::from_points(&pts).unwrap();
    let cfg = SolverConfig { seed: 3, ..SolverConfig::default() };
    let params = cfg.resolve(&m).unwrap();
    let tree = build_tree(&m, &params, 2).unwrap();
    println!("clusters {}, splits {}, height {}", tree.clusters.len(), tree.splits.len(), tree.height);
    tree.validate(&m).expect("partition, halving and portal cover hold");
    for (i, split) in tree.cluster_splits[0].iter().enumerate() {
        let sp = &tree.splits[*split];
        println!("root split {i}: parts {:?}", sp.parts);
        println!("  portals {:?}", sp.portals);
    }
}
