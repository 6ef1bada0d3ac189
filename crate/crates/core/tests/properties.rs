//! Invariants checked on random instances.

use orienteer::deadline::{guess_from_path, mgl_doubling, prefix_violations, solve_deadline_dbl, verify_walk, DeadlineOptions, ExcessOrder};
use orienteer::doubling::{default_mu, solve_kstroll_dbl, solve_p2p_dbl, DoublingSolver, SolverConfig};
use orienteer::harness::{generate, solve, verify_report, Command, DeadlineMode, GenParams, Kind, SolveOptions};
use orienteer::instance::InstanceFile;
use orienteer::metric::{net_is_valid, BuildOptions, MetricInstance, RawMetric};
use orienteer::oracle::{exact_deadline, exact_kstroll, exact_p2p};
use orienteer::path::{equal_size_jump, mu_excess, Walk};
use orienteer::rational::Q;
use orienteer::treewidth::solve_p2p_tw;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn points(seed: u64, n: usize) -> MetricInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Vec<i64>> = Vec::new();
    while pts.len() < n {
        let p = vec![rng.gen_range(0..50), rng.gen_range(0..50)];
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    MetricInstance::from_points(&pts).unwrap()
}

fn walk(seed: u64, m: &MetricInstance, len: usize) -> Walk {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
    let mut v = vec![rng.gen_range(0..m.n())];
    while v.len() < len {
        let x = rng.gen_range(0..m.n());
        if Some(&x) != v.last() {
            v.push(x);
        }
    }
    Walk::new(m, v)
}

fn deadlines(seed: u64, n: usize) -> MetricInstance {
    let p = GenParams { n, deadlines: true, ..GenParams::default() };
    generate(Kind::Bounded, &p, seed).unwrap().parse().unwrap().metric
}

/// All orderings of `rest`, by recursion.
fn permutations(rest: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == rest.len() {
        out.push(rest.clone());
        return;
    }
    for i in k..rest.len() {
        rest.swap(k, i);
        permutations(rest, k + 1, out);
        rest.swap(k, i);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nets_cover_and_pack(seed in any::<u64>(), n in 2usize..12, num in 1i64..8) {
        let m = points(seed, n);
        let all: Vec<usize> = (0..n).collect();
        let rho = Q::new(num, 8);
        let net = m.greedy_net(&all, &rho, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(net_is_valid(&m, &all, &net));
        // packing: centers are rho/2-separated, so at most (2 diam / rho + 1)^3 of them in the plane
        let diam = m.diameter(&all).unwrap();
        let bound = (2.0 * orienteer::rational::to_f64(&(diam / rho)) + 1.0).powi(3);
        prop_assert!(net.centers.len() as f64 <= bound);
    }

    #[test]
    fn balls_grow_with_radius(seed in any::<u64>(), n in 2usize..10, a in 0i64..20, b in 0i64..20) {
        let m = points(seed, n);
        let (r1, r2) = (Q::new(a.min(b), 4), Q::new(a.max(b), 4));
        for v in 0..n {
            let small = m.ball(v, &r1);
            let big = m.ball(v, &r2);
            prop_assert!(small.iter().all(|u| big.contains(u)));
        }
    }

    #[test]
    fn normalizing_twice_changes_nothing(seed in any::<u64>(), n in 2usize..9) {
        let m = points(seed, n);
        let rows: Vec<Vec<Q>> = (0..n).map(|u| (0..n).map(|v| m.distance(u, v)).collect()).collect();
        let again = MetricInstance::build(RawMetric::Matrix(rows), &BuildOptions::default()).unwrap();
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(again.distance(u, v), m.distance(u, v));
            }
        }
    }

    #[test]
    fn excess_is_monotone_and_legs_add_up(seed in any::<u64>(), len in 2usize..11) {
        let m = points(seed, 9);
        let w = walk(seed, &m, len);
        let ex: Vec<i64> = (2..=len).map(|mu| mu_excess(&m, &w, mu).unwrap()).collect();
        prop_assert!(ex.windows(2).all(|p| p[1] <= p[0]));
        prop_assert!(ex.iter().all(|&e| e >= 0 && e <= ex[0]));
        prop_assert_eq!(*ex.last().unwrap(), 0);
        for mu in 2..=len.min(5) {
            let jump = equal_size_jump(&m, &w, mu).unwrap();
            let legs: Vec<Walk> = jump.positions.windows(2).map(|p| w.subpath(&m, p[0], p[1]).unwrap()).collect();
            prop_assert_eq!(legs.iter().map(Walk::length).sum::<i64>(), w.length());
            let leg_excess: i64 = legs.iter().map(|l| mu_excess(&m, l, 2).unwrap()).sum();
            prop_assert_eq!(leg_excess, w.length() - jump.length);
        }
    }

    #[test]
    fn treewidth_prize_grows_with_budget(seed in any::<u64>(), n in 4usize..10) {
        let p = GenParams { n, width: 2, with_end: true, ..GenParams::default() };
        let m = generate(Kind::LowTreewidth, &p, seed).unwrap().parse().unwrap().metric;
        let (s, t) = (m.start, m.end.unwrap());
        let mut last = 0;
        for extra in [0, 3, 7, 15, 40] {
            let b = m.d(s, t) + m.raw_floor_ticks(&Q::from_integer(extra));
            let r = solve_p2p_tw(&m, None, s, t, b, false).unwrap();
            prop_assert_eq!(r.walk().distinct_count(), r.prize);
            prop_assert!(r.length <= b && r.prize >= last);
            last = r.prize;
        }
    }

    #[test]
    fn doubling_outputs_are_feasible_and_never_superoptimal(seed in any::<u64>(), n in 3usize..9, kf in 0.0f64..1.0) {
        let m = points(seed, n);
        let k = 2 + ((n - 2) as f64 * kf) as usize;
        let cfg = SolverConfig { seed, ..SolverConfig::default() };
        let a = solve_kstroll_dbl(&m, 0, 1, k, &cfg).unwrap();
        let v = a.walk.vertices();
        prop_assert_eq!((v[0], *v.last().unwrap()), (0, 1));
        prop_assert!(a.walk.distinct_count() >= k);
        prop_assert_eq!(a.walk.recomputed_length(&m), a.length);
        prop_assert!(a.length >= exact_kstroll(&m, 0, 1, k).unwrap().value);
        prop_assert_eq!(solve_kstroll_dbl(&m, 0, 1, k, &cfg).unwrap().walk, a.walk);
    }

    #[test]
    fn doubling_prize_grows_with_budget(seed in any::<u64>(), n in 3usize..9) {
        let m = points(seed, n);
        let cfg = SolverConfig { seed, ..SolverConfig::default() };
        let mut solver = DoublingSolver::new(&m, &cfg).unwrap();
        let mut last = 0;
        for f in [10, 12, 15, 20, 30] {
            let b = m.d(0, 1) * f / 10;
            let r = solver.p2p(0, 1, b, false).unwrap();
            prop_assert!(r.length <= b && r.walk.distinct_count() == r.prize && r.prize >= last);
            prop_assert!(r.prize as i64 <= exact_p2p(&m, 0, 1, b, false).unwrap().value);
            last = r.prize;
        }
    }

    #[test]
    fn single_level_trees_are_exact(seed in any::<u64>(), n in 2usize..4, k in 2usize..4) {
        let m = points(seed, n);
        let k = k.min(n);
        let cfg = SolverConfig { gamma: Some(1), seed, ..SolverConfig::default() };
        let t = n - 1;
        prop_assert_eq!(solve_kstroll_dbl(&m, 0, t, k, &cfg).unwrap().length, exact_kstroll(&m, 0, t, k).unwrap().value);
    }

    #[test]
    fn deadline_walks_are_feasible_and_plans_respect_budgets(seed in any::<u64>(), n in 4usize..8) {
        let m = deadlines(seed, n);
        let cfg = SolverConfig { m_max: 3, seed, ..SolverConfig::default() };
        let sol = solve_deadline_dbl(&m, &cfg, &DeadlineOptions::default()).unwrap();
        let again = verify_walk(&m, sol.walk.vertices(), false);
        prop_assert_eq!(&again.on_time, &sol.verified.on_time);
        for &(v, t) in &again.arrivals {
            prop_assert_eq!(sol.verified.on_time.contains(&v), t <= m.deadline(v));
        }
        prop_assert!(sol.on_time as i64 <= exact_deadline(&m, m.start).unwrap().value);

        // plans along the optimal skeleton: budgets, nesting, and the deadline chain
        let opt = exact_deadline(&m, m.start).unwrap();
        let eps = cfg.eps;
        let guess = guess_from_path(&m, opt.witness.vertices(), &eps, default_mu(&eps), ExcessOrder::Mu, n, false);
        for g in &guess.groups {
            for j in 1..g.legs() {
                prop_assert!(g.prefix[j - 1] <= g.prefix[j]);
                prop_assert!((0..n).all(|v| !g.eligible[j][v] || g.eligible[j - 1][v]));
            }
        }
        let mut solver = DoublingSolver::with_gamma(&m, &cfg, cfg.gamma_deadline).unwrap();
        if let Some(plan) = mgl_doubling(&mut solver, &guess, &eps) {
            let mut before = 0i64;
            for (g, legs) in guess.groups.iter().zip(&plan.legs) {
                let used: i64 = legs.iter().map(|l| m.seq_len(l)).sum();
                prop_assert!(used <= g.reduced_budget(&eps));
                // a credited vertex within the prefix bound is on time
                let slack = (Q::from_integer(1) - eps) * Q::from_integer(g.excess_before_end);
                let mut t = 0i64;
                for (j, leg) in legs.iter().enumerate() {
                    let bound = Q::from_integer(g.prefix[j] - g.prefix[0]) + slack;
                    for w in leg.windows(2) {
                        t += m.d(w[0], w[1]);
                        let v = w[1];
                        if g.eligible[j][v] && !g.jumps.contains(&v) && Q::from_integer(t) <= bound {
                            prop_assert!(before + t <= m.deadline(v), "vertex {} at {} after {}", v, before + t, m.deadline(v));
                        }
                    }
                }
                before += used;
            }
            let _ = prefix_violations(&m, &guess, &plan, &eps);
        }
    }

    #[test]
    fn loose_deadlines_reduce_to_orienteering(seed in any::<u64>(), n in 3usize..7) {
        let m = points(seed, n);
        let loose = m.clone().with_deadlines(&vec![Some(Q::from_integer(1_000_000)); n]);
        let cfg = SolverConfig { m_max: 1, seed, ..SolverConfig::default() };
        let d = solve_deadline_dbl(&loose, &cfg, &DeadlineOptions { allow_rational: true, ..DeadlineOptions::default() }).unwrap();
        let far = (0..n).max_by_key(|&v| (m.d(0, v), v)).unwrap();
        let b = m.raw_floor_ticks(&Q::from_integer(1_000_000));
        let p = solve_p2p_dbl(&m, 0, far, b, false, &cfg).unwrap();
        prop_assert_eq!(d.on_time, p.prize);
    }

    #[test]
    fn oracles_match_permutation_search(seed in any::<u64>(), n in 3usize..7) {
        let m = deadlines(seed, n);
        let mut rest: Vec<usize> = (1..n).collect();
        let mut perms = Vec::new();
        permutations(&mut rest, 0, &mut perms);
        let (mut best_stroll, mut best_dead) = (i64::MAX, 0);
        for p in &perms {
            let mut seq = vec![0];
            seq.extend(p);
            // k-stroll from 0 to 1 over all n vertices
            if seq.last() == Some(&1) {
                best_stroll = best_stroll.min(m.seq_len(&seq));
            }
            for end in 1..=seq.len() {
                best_dead = best_dead.max(verify_walk(&m, &seq[..end], false).count() as i64);
            }
        }
        let ks = exact_kstroll(&m, 0, 1, n).unwrap();
        prop_assert_eq!(ks.value, best_stroll);
        prop_assert_eq!(ks.witness.recomputed_length(&m), ks.value);
        let dl = exact_deadline(&m, 0).unwrap();
        prop_assert_eq!(dl.value, best_dead);
        prop_assert_eq!(verify_walk(&m, dl.witness.vertices(), false).count() as i64, dl.value);
    }

    #[test]
    fn generated_files_reemit_identically(seed in any::<u64>(), kind in prop_oneof![
        Just(Kind::Euclidean), Just(Kind::Uniform), Just(Kind::TreeMetric), Just(Kind::GridGraph), Just(Kind::LowTreewidth), Just(Kind::Bounded)
    ]) {
        let p = GenParams { n: 7, deadlines: true, budget_factor: Some(1.5), k_min: Some(3), with_end: true, ..GenParams::default() };
        let text = generate(kind, &p, seed).unwrap().to_json();
        let back = InstanceFile::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text.clone());
        let inst = back.parse().unwrap();
        for command in [Command::Kstroll, Command::P2p, Command::Deadline] {
            let mut o = SolveOptions::new(command);
            o.m_max = 3;
            if command == Command::Deadline && !inst.metric.is_integral() {
                o.mode = DeadlineMode::Bicriteria;
            }
            o.timing = false;
            let r = solve(&inst, &o).unwrap();
            prop_assert!(verify_report(&inst, &r).unwrap().ok);
        }
    }
}
