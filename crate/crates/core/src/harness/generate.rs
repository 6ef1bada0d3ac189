//! Seeded instance generators.

use crate::error::SolveError;
use crate::instance::{InstanceFile, NodeId, Num};
use crate::rational::{floor_q, Q};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// integer points in a square, Euclidean distances
    Euclidean,
    /// all distances one
    Uniform,
    /// shortest paths on a random weighted tree
    TreeMetric,
    /// shortest paths on a weighted grid
    GridGraph,
    /// shortest paths on a random partial k-tree
    LowTreewidth,
    /// random matrix with entries in [max/2, max], always a metric
    Bounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenParams {
    pub n: usize,
    /// coordinate range for Euclidean points
    pub side: i64,
    pub dim: usize,
    /// largest edge weight or matrix entry
    pub max_weight: i64,
    /// treewidth bound for low-treewidth graphs
    pub width: usize,
    /// chance to keep each non-tree edge of the k-tree
    pub density: f64,
    /// weights get denominators up to this value
    pub denominator: i64,
    pub deadlines: bool,
    /// deadlines are the reference tour's arrival times scaled by 1 ± jitter
    pub jitter: f64,
    /// when set, `budget = factor · d(start, end)`
    pub budget_factor: Option<f64>,
    /// when set, `k` is drawn from `[k_min, n]`
    pub k_min: Option<usize>,
    pub with_end: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 8,
            side: 100,
            dim: 2,
            max_weight: 8,
            width: 2,
            density: 0.6,
            denominator: 1,
            deadlines: false,
            jitter: 0.3,
            budget_factor: None,
            k_min: None,
            with_end: false,
        }
    }
}

fn weight(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Q {
    if den <= 1 {
        Q::from_integer(rng.gen_range(lo..=hi))
    } else {
        Q::new(rng.gen_range(lo * den..=hi * den), den)
    }
}

fn closure(n: usize, edges: &[(usize, usize, Q)]) -> Vec<Vec<Option<Q>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(Q::from_integer(0));
    }
    for &(u, v, w) in edges {
        if d[u][v].is_none_or(|x| w < x) {
            d[u][v] = Some(w);
            d[v][u] = Some(w);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|x| a + b < x) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

fn check(p: &GenParams) -> Result<(), SolveError> {
    let bad = |s: &str| Err(SolveError::Config(s.into()));
    if p.n == 0 {
        return bad("n must be positive");
    }
    if p.max_weight < 1 || p.side < 1 || p.dim == 0 || p.denominator < 1 {
        return bad("weights, side, dim and denominator must be positive");
    }
    if !(0.0..=1.0).contains(&p.density) || !(0.0..1.0).contains(&p.jitter) {
        return bad("density must lie in [0,1] and jitter in [0,1)");
    }
    if p.k_min.is_some_and(|k| k > p.n) {
        return bad("k_min exceeds n");
    }
    Ok(())
}

fn random_k_tree(rng: &mut ChaCha8Rng, p: &GenParams) -> Vec<(usize, usize, Q)> {
    let n = p.n;
    let w = p.width.max(1).min(n.saturating_sub(1)).max(1);
    let mut edges = BTreeSet::new();
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let base: Vec<usize> = (0..(w + 1).min(n)).collect();
    for i in 0..base.len() {
        for j in i + 1..base.len() {
            edges.insert((i, j, j == i + 1));
        }
    }
    for drop in 0..base.len() {
        cliques.push(base.iter().copied().filter(|&x| x != drop || base.len() == 1).collect());
    }
    for v in base.len()..n {
        let c = cliques[rng.gen_range(0..cliques.len())].clone();
        for (idx, &u) in c.iter().enumerate() {
            edges.insert((u.min(v), u.max(v), idx == 0));
        }
        for drop in 0..c.len() {
            let mut nc: Vec<usize> = c.iter().copied().filter(|&x| x != c[drop]).collect();
            nc.push(v);
            cliques.push(nc);
        }
    }
    let mut kept = BTreeMap::new();
    for (u, v, keep) in edges {
        if keep || rng.gen_bool(p.density) {
            kept.entry((u, v)).or_insert_with(|| weight(rng, 1, p.max_weight, p.denominator));
        }
    }
    kept.into_iter().map(|((u, v), w)| (u, v, w)).collect()
}

/// Deterministic instance for `(kind, params, seed)`.
pub fn generate(kind: Kind, p: &GenParams, seed: u64) -> Result<InstanceFile, SolveError> {
    check(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.n;
    let nodes: Vec<NodeId> = (0..n).map(|i| NodeId(format!("v{i}"))).collect();
    let mut file = InstanceFile {
        id: Some(format!("{}-n{n}-s{seed}", serde_json::to_value(kind).expect("kind").as_str().expect("str"))),
        nodes: nodes.clone(),
        matrix: None,
        coords: None,
        edges: None,
        start: nodes[0].clone(),
        end: None,
        deadlines: None,
        budget: None,
        k: None,
        bags: None,
        bag_tree: None,
    };
    // shortest-path distances for deadlines and budgets
    let dist: Vec<Vec<Q>>;
    match kind {
        Kind::Euclidean => {
            let mut pts: BTreeSet<Vec<i64>> = BTreeSet::new();
            let mut order = Vec::new();
            while order.len() < n {
                let pt: Vec<i64> = (0..p.dim).map(|_| rng.gen_range(0..=p.side)).collect();
                if pts.insert(pt.clone()) {
                    order.push(pt);
                }
                if pts.len() as i128 >= (i128::from(p.side) + 1).pow(p.dim as u32) && order.len() < n {
                    return Err(SolveError::Config("too many points for the coordinate range".into()));
                }
            }
            dist = order
                .iter()
                .map(|a| {
                    order
                        .iter()
                        .map(|b| {
                            let ss: i64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                            Q::from_integer((ss as f64).sqrt().ceil() as i64)
                        })
                        .collect()
                })
                .collect();
            file.coords = Some(order.iter().map(|pt| pt.iter().map(|&x| Num::from(x)).collect()).collect());
        }
        Kind::Uniform => {
            dist = (0..n).map(|i| (0..n).map(|j| Q::from_integer(i64::from(i != j))).collect()).collect();
            file.matrix = Some(dist.iter().map(|r| r.iter().map(|&x| Num(x)).collect()).collect());
        }
        Kind::Bounded => {
            let lo = (p.max_weight + 1) / 2;
            let mut d = vec![vec![Q::from_integer(0); n]; n];
            #[allow(clippy::needless_range_loop)]
            for i in 0..n {
                for j in i + 1..n {
                    let w = weight(&mut rng, lo.max(1), p.max_weight, p.denominator);
                    d[i][j] = w;
                    d[j][i] = w;
                }
            }
            file.matrix = Some(d.iter().map(|r| r.iter().map(|&x| Num(x)).collect()).collect());
            dist = d;
        }
        Kind::TreeMetric | Kind::GridGraph | Kind::LowTreewidth => {
            let edges: Vec<(usize, usize, Q)> = match kind {
                Kind::TreeMetric => (1..n).map(|v| (rng.gen_range(0..v), v, weight(&mut rng, 1, p.max_weight, p.denominator))).collect(),
                Kind::GridGraph => {
                    let cols = (n as f64).sqrt().ceil() as usize;
                    let mut es = Vec::new();
                    for v in 0..n {
                        if v % cols + 1 < cols && v + 1 < n {
                            es.push((v, v + 1, weight(&mut rng, 1, p.max_weight, p.denominator)));
                        }
                        if v + cols < n {
                            es.push((v, v + cols, weight(&mut rng, 1, p.max_weight, p.denominator)));
                        }
                    }
                    es
                }
                _ => random_k_tree(&mut rng, p),
            };
            dist = closure(n, &edges).into_iter().map(|r| r.into_iter().map(|x| x.expect("connected")).collect()).collect();
            file.edges = Some(edges.iter().map(|&(u, v, w)| (nodes[u].clone(), nodes[v].clone(), Num(w))).collect());
        }
    }
    if p.with_end && n > 1 {
        file.end = Some(nodes[rng.gen_range(1..n)].clone());
    }
    let end = file.end.as_ref().map_or(0, |e| nodes.iter().position(|x| x == e).expect("end"));
    if p.deadlines {
        let mut tour: Vec<usize> = (1..n).collect();
        tour.shuffle(&mut rng);
        tour.insert(0, 0);
        let mut t = Q::from_integer(0);
        let mut map = BTreeMap::new();
        map.insert(nodes[0].clone(), Num::from(0));
        for w in tour.windows(2) {
            t += dist[w[0]][w[1]];
            let f = 1.0 + p.jitter * rng.gen_range(-1.0..=1.0);
            let scale = Q::new((f * 1000.0).round() as i64, 1000);
            let d = t * scale;
            let d = if p.denominator <= 1 { Q::from_integer(floor_q(&d)) } else { Q::new(floor_q(&(d * p.denominator)), p.denominator) };
            map.insert(nodes[w[1]].clone(), Num(d));
        }
        file.deadlines = Some(map);
    }
    if let Some(f) = p.budget_factor {
        let b = dist[0][end] * Q::new((f * 1000.0).round() as i64, 1000);
        file.budget = Some(Num(b));
    }
    if let Some(k) = p.k_min {
        file.k = Some(rng.gen_range(k.max(1)..=n));
    }
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treewidth::{heuristic_tree_decomposition, Graph};

    #[test]
    fn same_seed_same_bytes() {
        let p = GenParams { deadlines: true, ..GenParams::default() };
        let a = generate(Kind::Euclidean, &p, 1).unwrap().to_json();
        let b = generate(Kind::Euclidean, &p, 1).unwrap().to_json();
        assert_eq!(a, b);
        assert_ne!(a, generate(Kind::Euclidean, &p, 2).unwrap().to_json());
    }

    #[test]
    fn uniform_off_diagonal_is_constant() {
        let f = generate(Kind::Uniform, &GenParams { n: 5, ..GenParams::default() }, 0).unwrap();
        let m = f.parse().unwrap().metric;
        for u in 0..5 {
            for v in 0..5 {
                assert_eq!(m.d(u, v), i64::from(u != v) * m.d(0, 1));
            }
        }
    }

    #[test]
    fn low_treewidth_stays_low() {
        for seed in 0..20 {
            let p = GenParams { n: 12, width: 2, ..GenParams::default() };
            let m = generate(Kind::LowTreewidth, &p, seed).unwrap().parse().unwrap().metric;
            let td = heuristic_tree_decomposition(&Graph::from_metric(&m));
            assert!(td.width() <= 2, "seed {seed}: width {}", td.width());
        }
    }

    #[test]
    fn bounded_rational_matrices_are_metrics() {
        for seed in 0..10 {
            let p = GenParams { denominator: 4, deadlines: true, ..GenParams::default() };
            let inst = generate(Kind::Bounded, &p, seed).unwrap().parse().unwrap();
            assert_eq!(inst.deadlines.as_ref().unwrap()[0], Some(Q::from_integer(0)));
            let int = generate(Kind::Bounded, &GenParams { deadlines: true, ..GenParams::default() }, seed).unwrap().parse().unwrap();
            assert!(int.metric.is_integral());
        }
    }
}
