//! Measure how often random partitions separate each pair of points.

use orienteer::harness::calibrate;
use orienteer::metric::MetricInstance;

fn main() {
    let pts: Vec<Vec<i64>> = (0..8).map(|i| vec![i * i]).collect();
    let m = MetricInstance::from_points(&pts).unwrap();
    let report = calibrate(&m, 2000, 1).unwrap();
    println!("kappa_fit {:.3}  upper {:.3}  suggested kappa' {}", report.kappa_fit, report.kappa_upper, report.kappa_prime);
    for p in report.pairs.iter().filter(|p| p.u == 0) {
        println!("  (0,{}) r = {:.3}  cut {:.3}  bound {:.3}", p.v, p.relative_distance, p.frequency, report.bound(p.relative_distance));
    }
}
