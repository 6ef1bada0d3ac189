//! Shortcut a walk through its cheapest mu-jump and read off the excess.

use orienteer::metric::MetricInstance;
use orienteer::path::{equal_size_jump, mu_excess, optimal_mu_jump, Walk};

fn main() {
    let xs = [0i64, 5, 1, 6, 2, 9, 3];
    let rows: Vec<Vec<i64>> = xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect();
    let m = MetricInstance::from_int_matrix(&rows).unwrap();
    let w = Walk::new(&m, (0..xs.len()).collect());
    println!("walk length {}", m.raw(w.length()));
    for mu in 2..=5 {
        let best = optimal_mu_jump(&m, &w, mu).unwrap();
        let even = equal_size_jump(&m, &w, mu).unwrap();
        println!(
            "mu={mu}: longest jump {:?} len {}  equal-size {:?} len {}  excess {}",
            best.positions,
            m.raw(best.length),
            even.positions,
            m.raw(even.length),
            m.raw(mu_excess(&m, &w, mu).unwrap())
        );
    }
}
