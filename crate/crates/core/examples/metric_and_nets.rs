//! Build a metric from points, inspect its scale and cover it with a net.

use orienteer::metric::{net_is_valid, MetricInstance};
use orienteer::rational::Q;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let pts = vec![vec![0, 0], vec![3, 4], vec![6, 8], vec![10, 0], vec![1, 9], vec![7, 3]];
    let m = MetricInstance::from_points(&pts).expect("points form a metric");
    println!("n = {}, aspect ratio = {}, log aspect = {:.3}", m.n(), m.aspect_ratio(), m.log_aspect());
    println!("normalized d(0,1) = {}  d(0,3) = {}", m.distance(0, 1), m.distance(0, 3));
    println!("doubling dimension estimate = {}", m.doubling_dimension_estimate());

    let all: Vec<usize> = (0..m.n()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let net = m.greedy_net(&all, &Q::new(1, 4), &mut rng);
    println!("1/4-net centers {:?}, valid = {}", net.centers, net_is_valid(&m, &all, &net));
}
