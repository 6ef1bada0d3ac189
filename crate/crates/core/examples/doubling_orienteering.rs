//! Point-to-point orienteering: most vertices within a length budget.

use orienteer::doubling::{solve_p2p_dbl, SolverConfig};
use orienteer::metric::MetricInstance;
use orienteer::oracle::exact_p2p;
use orienteer::rational::Q;

fn main() {
    let pts = vec![vec![0, 0], vec![20, 0], vec![4, 3], vec![9, -2], vec![15, 4], vec![10, 10], vec![2, -8], vec![18, -6]];
    let m = MetricInstance::from_points(&pts).unwrap();
    let cfg = SolverConfig::default();
    let geo = m.raw(m.d(0, 1));
    for factor in [Q::from_integer(1), Q::new(13, 10), Q::from_integer(2)] {
        let budget = m.raw_floor_ticks(&(geo * factor));
        let sol = solve_p2p_dbl(&m, 0, 1, budget, false, &cfg).unwrap();
        let opt = exact_p2p(&m, 0, 1, budget, false).unwrap();
        println!("B = {factor} x d(s,t): prize {} oracle {}  walk {:?}", sol.prize, opt.value, sol.walk.vertices());
    }
}
