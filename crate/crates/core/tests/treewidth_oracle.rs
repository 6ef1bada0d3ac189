use orienteer::metric::{BuildOptions, MetricInstance, RawMetric};
use orienteer::oracle::{exact_kstroll, exact_p2p};
use orienteer::rational::Q;
use orienteer::treewidth::{heuristic_tree_decomposition, solve_kstroll_tw, solve_p2p_tw, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random connected graph: a random tree plus a few chords among near indices.
fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> MetricInstance {
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(v.saturating_sub(3)..v);
        edges.push((u, v, Q::from_integer(rng.gen_range(1..6))));
    }
    for _ in 0..n / 3 {
        let v = rng.gen_range(2..n);
        let u = rng.gen_range(v.saturating_sub(2)..v);
        edges.push((u, v, Q::from_integer(rng.gen_range(1..6))));
    }
    MetricInstance::build(RawMetric::Graph { n, edges }, &BuildOptions::default()).unwrap()
}

#[test]
fn kstroll_matches_subset_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.gen_range(4..=11);
        let m = random_graph(&mut rng, n);
        let width = heuristic_tree_decomposition(&Graph::from_metric(&m)).width();
        assert!(width <= 3);
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        for k in [2, n / 2, n] {
            let tw = solve_kstroll_tw(&m, None, s, t, k).unwrap();
            let or = exact_kstroll(&m, s, t, k).unwrap();
            assert_eq!(tw.length, or.value, "n={n} s={s} t={t} k={k}");
            let w = tw.walk();
            assert_eq!((w.first(), w.last()), (Some(s), Some(t)));
            assert!(w.distinct_count() >= k);
        }
    }
}

#[test]
fn p2p_matches_subset_oracle_and_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..15 {
        let n = rng.gen_range(4..=10);
        let m = random_graph(&mut rng, n);
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let mut last = 0;
        for extra in 0..6 {
            let b = m.d(s, t) + extra * m.diameter_ticks() / 2;
            let tw = solve_p2p_tw(&m, None, s, t, b, false).unwrap();
            let or = exact_p2p(&m, s, t, b, false).unwrap();
            assert_eq!(tw.prize as i64, or.value, "n={n} s={s} t={t} b={b}");
            assert!(tw.walk().length() <= b);
            assert_eq!(tw.walk().distinct_count(), tw.prize);
            assert!(tw.prize >= last);
            last = tw.prize;
        }
    }
}
