//! Exact k-stroll and orienteering on a small-treewidth graph.

use orienteer::metric::{BuildOptions, MetricInstance, RawMetric};
use orienteer::oracle::{exact_kstroll, exact_p2p};
use orienteer::rational::Q;
use orienteer::treewidth::{heuristic_tree_decomposition, solve_kstroll_tw, solve_p2p_tw, Graph};

fn main() {
    // a ladder: two paths of 5 joined by rungs
    let mut edges = Vec::new();
    for i in 0..4 {
        edges.push((i, i + 1, Q::from_integer(2)));
        edges.push((i + 5, i + 6, Q::from_integer(3)));
    }
    for i in 0..5 {
        edges.push((i, i + 5, Q::from_integer(1 + (i as i64 % 2))));
    }
    let m = MetricInstance::build(RawMetric::Graph { n: 10, edges }, &BuildOptions::default()).unwrap();
    let td = heuristic_tree_decomposition(&Graph::from_metric(&m));
    println!("heuristic width {}", td.width());

    let (s, t) = (0, 9);
    for k in [3, 6, 10] {
        let dp = solve_kstroll_tw(&m, Some(&td), s, t, k).unwrap();
        let or = exact_kstroll(&m, s, t, k).unwrap();
        println!("k={k}: dp {} oracle {}  walk {:?}", m.raw(dp.length), m.raw(or.value), dp.walk().vertices());
    }
    let budget = m.raw_floor_ticks(&Q::from_integer(14));
    let dp = solve_p2p_tw(&m, Some(&td), s, t, budget, false).unwrap();
    println!("budget 14: prize {} (oracle {})", dp.prize, exact_p2p(&m, s, t, budget, false).unwrap().value);
}
