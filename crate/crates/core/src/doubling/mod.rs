//! k-stroll and point-to-point orienteering on doubling metrics.

pub mod config;
pub mod table;

pub use config::{default_mu, Params, SolverConfig};
pub use table::{Mask, Row, SplitTreeTables};

use crate::decomposition::{build_gamma_split_tree, portal_edges, GammaSplitTree};
use crate::error::SolveError;
use crate::metric::{MetricInstance, INF};
use crate::oracle;
use crate::path::Walk;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, Serialize)]
pub struct TreeStats {
    pub clusters: usize,
    pub splits: usize,
    pub height: usize,
    pub gamma: usize,
    pub table_entries: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DblSolution {
    pub walk: Walk,
    /// total length in ticks, summed over walks for multi-path queries
    pub length: i64,
    pub prize: usize,
    /// false when a practical cap was tighter than the configured theory
    pub certified: bool,
    /// prize came from exhaustive search
    pub exhaustive: bool,
    pub seed: u64,
    pub tree_stats: TreeStats,
}

/// Built split tree with its tables, reusable across queries on one instance.
pub struct DoublingSolver<'a> {
    pub m: &'a MetricInstance,
    pub params: Params,
    tables: SplitTreeTables,
    rows: HashMap<usize, Row>,
}

fn check_size(m: &MetricInstance, max_n: usize) -> Result<(), SolveError> {
    let max = max_n.min(20);
    if m.n() > max {
        return Err(SolveError::TooLarge { n: m.n(), max });
    }
    Ok(())
}

/// Builds the tree over all vertices and checks every split's portal-edge bound.
pub fn build_tree(m: &MetricInstance, params: &Params, gamma: usize) -> Result<GammaSplitTree, SolveError> {
    let all: Vec<usize> = (0..m.n()).collect();
    let pp = params.portal_params();
    let tree = build_gamma_split_tree(m, &all, gamma, params.leaf_size, &pp, params.seed)?;
    for split in &tree.splits {
        portal_edges(split, &pp)?;
    }
    Ok(tree)
}

impl<'a> DoublingSolver<'a> {
    pub fn new(m: &'a MetricInstance, cfg: &SolverConfig) -> Result<Self, SolveError> {
        let params = cfg.resolve(m)?;
        Self::with_gamma(m, cfg, params.gamma)
    }

    pub fn with_gamma(m: &'a MetricInstance, cfg: &SolverConfig, gamma: usize) -> Result<Self, SolveError> {
        check_size(m, cfg.max_n)?;
        let mut params = cfg.resolve(m)?;
        params.gamma = gamma;
        let tree = build_tree(m, &params, gamma)?;
        let tables = SplitTreeTables::build(m, tree, params.sparse_cap, params.crossing_cap);
        Ok(DoublingSolver { m, params, tables, rows: HashMap::new() })
    }

    pub fn tree(&self) -> &GammaSplitTree {
        &self.tables.tree
    }

    pub fn certified(&self) -> bool {
        !self.tables.cap_bound
    }

    pub fn stats(&self) -> TreeStats {
        let t = &self.tables.tree;
        TreeStats {
            clusters: t.clusters.len(),
            splits: t.splits.len(),
            height: t.height,
            gamma: t.gamma,
            table_entries: self.tables.entries,
        }
    }

    /// Shortest simple path lengths from `x` over every (end, vertex set).
    pub fn row(&mut self, x: usize) -> &Row {
        if !self.rows.contains_key(&x) {
            let r = self.tables.root_row(x);
            self.rows.insert(x, r);
        }
        &self.rows[&x]
    }

    /// Length of the table path from `x` to `y` through exactly `u` (global mask).
    pub fn path_len(&mut self, x: usize, y: usize, u: Mask) -> i64 {
        if u & (1 << x) == 0 || u & (1 << y) == 0 {
            return INF;
        }
        self.row(x).get(y, u)
    }

    /// Vertex sequence behind `path_len(x, y, u)`.
    pub fn path(&mut self, x: usize, y: usize, u: Mask) -> Vec<usize> {
        self.row(x);
        let row = &self.rows[&x];
        self.tables.root_path(row, y, u)
    }

    /// Cheapest closed or open walk from `s` to `t` through exactly `u`.
    fn stroll_len(&mut self, s: usize, t: usize, u: Mask) -> (i64, usize) {
        if s != t {
            return (self.path_len(s, t, u), t);
        }
        if u == 1 << s {
            return (0, s);
        }
        let n = self.m.n();
        let m = self.m;
        let row = self.row(s);
        (0..n)
            .filter(|&w| w != s && u & (1 << w) != 0)
            .map(|w| (row.get(w, u).saturating_add(m.d(w, s)), w))
            .min()
            .unwrap_or((INF, s))
    }

    fn stroll_walk(&mut self, s: usize, t: usize, u: Mask, last: usize) -> Walk {
        let mut seq = self.path(s, last, u);
        if s == t && last != s {
            seq.push(s);
        }
        Walk::new(self.m, seq)
    }

    fn solution(&self, walk: Walk, prize: usize, exhaustive: bool) -> DblSolution {
        DblSolution {
            length: walk.length(),
            walk,
            prize,
            certified: self.certified(),
            exhaustive,
            seed: self.params.seed,
            tree_stats: self.stats(),
        }
    }

    pub fn kstroll(&mut self, s: usize, t: usize, k: usize) -> Result<DblSolution, SolveError> {
        let n = self.m.n();
        if k > n {
            return Err(SolveError::TargetTooLarge { k, n });
        }
        let ends: Mask = (1 << s) | (1 << t);
        let mut best: Option<(i64, Mask, usize)> = None;
        for u in 1..(1u32 << n) {
            if u & ends != ends || (u.count_ones() as usize) < k {
                continue;
            }
            let (len, last) = self.stroll_len(s, t, u);
            if len < INF && best.is_none_or(|b| len < b.0) {
                best = Some((len, u, last));
            }
        }
        let (_, u, last) = best.ok_or_else(|| SolveError::Infeasible("no path".into()))?;
        let walk = self.stroll_walk(s, t, u, last);
        Ok(self.solution(walk, u.count_ones() as usize, false))
    }

    pub fn p2p(&mut self, s: usize, t: usize, budget: i64, exclude_endpoints: bool) -> Result<DblSolution, SolveError> {
        if budget < self.m.d(s, t) {
            return Err(SolveError::Infeasible(format!("budget below d(s,t) = {}", self.m.d(s, t))));
        }
        let n = self.m.n();
        let ends: Mask = (1 << s) | (1 << t);
        let prize_of = |u: Mask| (u.count_ones() - if exclude_endpoints { ends.count_ones() } else { 0 }) as usize;
        let mut best: Option<(usize, i64, Mask, usize)> = None;
        for u in 1..(1u32 << n) {
            if u & ends != ends {
                continue;
            }
            let (len, last) = self.stroll_len(s, t, u);
            if len > budget {
                continue;
            }
            let p = prize_of(u);
            if best.is_none_or(|b| p > b.0 || (p == b.0 && len < b.1)) {
                best = Some((p, len, u, last));
            }
        }
        let (prize, _, u, last) = best.expect("the direct path fits");
        let mu = self.params.mu;
        if prize < mu * mu && n <= oracle::MAX_STROLL_N {
            let exact = oracle::exact_p2p(self.m, s, t, budget, exclude_endpoints)?;
            if exact.value as usize > prize {
                return Ok(self.solution(exact.witness, exact.value as usize, true));
            }
        }
        let walk = self.stroll_walk(s, t, u, last);
        Ok(self.solution(walk, prize, false))
    }

    /// Vertex-disjoint walks, one per pair, crediting at least `k` distinct vertices in total.
    pub fn multipath_kstroll(&mut self, pairs: &[(usize, usize)], k: usize) -> Result<(i64, Vec<Walk>), SolveError> {
        let n = self.m.n();
        if pairs.is_empty() {
            return Err(SolveError::Config("no pairs".into()));
        }
        if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a >= n || b >= n) {
            return Err(SolveError::BadPair(a.max(b)));
        }
        let size = 1usize << n;
        // acc[j][u]: first j+1 pairs exactly covering u
        let mut acc: Vec<Vec<(i64, Mask, usize)>> = Vec::new();
        for (j, &(s, t)) in pairs.iter().enumerate() {
            let single: Vec<(i64, usize)> = (0..size as Mask).map(|u| self.stroll_len(s, t, u)).collect();
            let ends: Mask = (1 << s) | (1 << t);
            let mut cur = vec![(INF, 0 as Mask, 0usize); size];
            for u in 0..size as Mask {
                if j == 0 {
                    if u & ends == ends && single[u as usize].0 < INF {
                        cur[u as usize] = (single[u as usize].0, u, single[u as usize].1);
                    }
                    continue;
                }
                let prev = &acc[j - 1];
                // u1 is this pair's vertex set
                let mut u1 = u;
                loop {
                    if u1 & ends == ends {
                        let (a, last) = single[u1 as usize];
                        let b = prev[(u & !u1) as usize].0;
                        if a < INF && b < INF && a + b < cur[u as usize].0 {
                            cur[u as usize] = (a + b, u1, last);
                        }
                    }
                    if u1 == 0 {
                        break;
                    }
                    u1 = (u1 - 1) & u;
                }
            }
            acc.push(cur);
        }
        let last = acc.last().expect("pairs");
        let (total, mut u) = (0..size)
            .filter(|&u| u.count_ones() as usize >= k)
            .map(|u| (last[u].0, u as Mask))
            .min()
            .filter(|x| x.0 < INF)
            .ok_or_else(|| SolveError::Infeasible(format!("no disjoint walks cover {k} vertices")))?;
        let mut walks = Vec::new();
        for j in (0..pairs.len()).rev() {
            let (_, u1, end) = acc[j][u as usize];
            let (s, t) = pairs[j];
            walks.push(self.stroll_walk(s, t, u1, end));
            u &= !u1;
        }
        walks.reverse();
        Ok((total, walks))
    }
}

/// Shortest s–t walk through at least `k` vertices via the split-tree tables.
pub fn solve_kstroll_dbl(m: &MetricInstance, s: usize, t: usize, k: usize, cfg: &SolverConfig) -> Result<DblSolution, SolveError> {
    if k > m.n() {
        return Err(SolveError::TargetTooLarge { k, n: m.n() });
    }
    DoublingSolver::new(m, cfg)?.kstroll(s, t, k)
}

/// Most vertices on an s–t walk of length at most `budget` ticks.
pub fn solve_p2p_dbl(
    m: &MetricInstance,
    s: usize,
    t: usize,
    budget: i64,
    exclude_endpoints: bool,
    cfg: &SolverConfig,
) -> Result<DblSolution, SolveError> {
    if budget < m.d(s, t) {
        return Err(SolveError::Infeasible(format!("budget below d(s,t) = {}", m.d(s, t))));
    }
    DoublingSolver::new(m, cfg)?.p2p(s, t, budget, exclude_endpoints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Q;

    #[test]
    fn single_leaf_and_small_cases() {
        let m = MetricInstance::uniform(1);
        let sol = solve_kstroll_dbl(&m, 0, 0, 1, &SolverConfig::default()).unwrap();
        assert_eq!((sol.length, sol.prize), (0, 1));
        let u = MetricInstance::uniform(6);
        let sol = solve_kstroll_dbl(&u, 0, 1, 4, &SolverConfig::default()).unwrap();
        assert_eq!(sol.length, 3);
        assert_eq!(solve_kstroll_dbl(&u, 0, 1, 2, &SolverConfig::default()).unwrap().length, 1);
    }

    #[test]
    fn p2p_uniform() {
        let u = MetricInstance::uniform(5);
        let sol = solve_p2p_dbl(&u, 0, 1, 3, false, &SolverConfig::default()).unwrap();
        assert_eq!(sol.prize, 4);
        assert!(sol.walk.length() <= 3);
        let all = solve_p2p_dbl(&u, 0, 1, 100, false, &SolverConfig::default()).unwrap();
        assert_eq!(all.prize, 5);
    }

    #[test]
    fn multipath_direct_pairs() {
        let pts: Vec<Vec<i64>> = (0..6).map(|i| vec![i * 3, (i % 2) * 7]).collect();
        let m = MetricInstance::from_points(&pts).unwrap();
        let mut solver = DoublingSolver::new(&m, &SolverConfig::default()).unwrap();
        let (total, walks) = solver.multipath_kstroll(&[(0, 1), (2, 3)], 4).unwrap();
        assert_eq!(total, m.d(0, 1) + m.d(2, 3));
        assert_eq!(walks.len(), 2);
    }

    #[test]
    fn matches_oracle_on_points() {
        let pts: Vec<Vec<i64>> = vec![vec![0, 0], vec![5, 1], vec![2, 7], vec![9, 9], vec![4, 4], vec![8, 2], vec![1, 3], vec![6, 6]];
        let m = MetricInstance::from_points(&pts).unwrap();
        let cfg = SolverConfig { eps: Q::new(1, 2), seed: 3, ..Default::default() };
        let mut solver = DoublingSolver::new(&m, &cfg).unwrap();
        for k in 2..=8 {
            let sol = solver.kstroll(0, 3, k).unwrap();
            let or = oracle::exact_kstroll(&m, 0, 3, k).unwrap();
            assert_eq!(sol.length, or.value, "k={k}");
            assert!(sol.walk.distinct_count() >= k);
        }
        let tour = solver.kstroll(2, 2, 6).unwrap();
        assert_eq!(tour.length, oracle::exact_kstroll(&m, 2, 2, 6).unwrap().value);
    }
}
