//! Deadline TSP: guess a skeleton, route each group's legs, re-simulate.

use orienteer::deadline::{solve_deadline_dbl, solve_deadline_tw, DeadlineOptions};
use orienteer::doubling::SolverConfig;
use orienteer::metric::MetricInstance;
use orienteer::oracle::exact_deadline;
use orienteer::rational::Q;

fn main() {
    let xs = [0i64, 2, 5, 3, 9, 7, 12];
    let rows: Vec<Vec<i64>> = xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect();
    let deadlines = [0, 4, 6, 4, 20, 12, 14].map(|d| Some(Q::from_integer(d)));
    let m = MetricInstance::from_int_matrix(&rows).unwrap().with_deadlines(&deadlines);

    let cfg = SolverConfig { m_max: 3, ..SolverConfig::default() };
    let opts = DeadlineOptions::default();
    let opt = exact_deadline(&m, 0).unwrap();
    println!("optimum {} via {:?}", opt.value, opt.witness.vertices());

    let d = solve_deadline_dbl(&m, &cfg, &opts).unwrap();
    println!("doubling: {} on time, {} groups, {} candidates, walk {:?}", d.on_time, d.groups, d.candidates, d.walk.vertices());
    for (v, t) in &d.verified.arrivals {
        println!("  {v} arrives {t} deadline {}", m.deadline(*v));
    }
    let t = solve_deadline_tw(&m, None, &cfg, &opts).unwrap();
    println!("treewidth: {} on time, walk {:?}", t.on_time, t.walk.vertices());

    let guided = DeadlineOptions { oracle_guess: true, ..DeadlineOptions::default() };
    println!("from the optimal skeleton: {}", solve_deadline_dbl(&m, &cfg, &guided).unwrap().on_time);
}
