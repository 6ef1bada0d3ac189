//! Rational distances: round to powers of lambda, solve, measure the lateness.

use orienteer::deadline::{solve_deadline_bicriteria, DeadlineOptions};
use orienteer::doubling::SolverConfig;
use orienteer::metric::{BuildOptions, MetricInstance, RawMetric};
use orienteer::rational::{to_f64, Q};

fn main() {
    let coords: Vec<Vec<Q>> = [(0, 1), (7, 3), (5, 2), (9, 4), (1, 3)]
        .iter()
        .map(|&(a, b)| vec![Q::new(a, b), Q::new(b, 2)])
        .collect();
    let m = MetricInstance::build(RawMetric::Coords(coords), &BuildOptions::default()).unwrap();
    let raw: Vec<Option<Q>> = [Q::from_integer(0), Q::new(3, 2), Q::new(5, 2), Q::from_integer(4), Q::new(9, 2)].into_iter().map(Some).collect();
    let cfg = SolverConfig { m_max: 3, ..SolverConfig::default() };
    let (rounded, sol) = solve_deadline_bicriteria(&m, &raw, &cfg, &DeadlineOptions::default()).unwrap();
    println!("lambda = {}  scale = {}", sol.lambda, rounded.scale);
    println!("on time after rounding: {}  walk {:?}", sol.solution.on_time, sol.solution.walk.vertices());
    for ((v, t), (_, f)) in sol.true_arrivals.iter().zip(&sol.violations) {
        println!("  {v}: true arrival {t:.4}, lateness factor {f:.4}");
    }
    println!("worst factor {:.4}", to_f64(&sol.violation));
}
