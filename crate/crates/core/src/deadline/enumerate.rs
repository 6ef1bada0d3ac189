//! Phase-1 skeleton enumeration.
//!
//! Small groups (fewer than μ² vertices) are exact on-time subpaths, found
//! with a subset DP from the start that keeps the earliest arrival per
//! (visited set, last vertex). Large groups guess their end, the inner jump
//! nodes and the excess on a geometric grid. Skeletons stream level by level
//! in the number of groups; small-group prefixes always come before large
//! groups within one skeleton.

use super::guess::{alpha_pow, eligible_sets, guess_from_path, jump_positions, DeadlineGuess, ExcessOrder, GroupGuess};
use crate::metric::{MetricInstance, INF};
use crate::path::excess_or_zero;
use crate::path::Walk;
use crate::rational::Q;
use serde::Serialize;

/// Most vertices the subset DP accepts.
pub const MAX_ENUM_N: usize = 16;

#[derive(Debug, Clone)]
pub struct EnumConfig {
    pub eps: Q,
    pub mu: usize,
    pub order: ExcessOrder,
    pub m_max: usize,
    /// cap on skeletons that contain a guessed large group
    pub max_guesses: usize,
    /// keep small groups of a known path as fixed subpaths
    pub exact_small_groups: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EnumStats {
    pub small_skeletons: usize,
    pub large_skeletons: usize,
    /// the large-group cap stopped the stream early
    pub capped: bool,
}

struct Prefixes {
    n: usize,
    time: Vec<i64>,
    prev: Vec<u8>,
}

impl Prefixes {
    fn build(m: &MetricInstance, s: usize, max_vertices: usize) -> Self {
        let n = m.n();
        let size = 1usize << n;
        let mut time = vec![INF; size * n];
        let mut prev = vec![u8::MAX; size * n];
        time[(1 << s) * n + s] = 0;
        for mask in 1..size {
            if mask & (1 << s) == 0 || mask.count_ones() as usize >= max_vertices {
                continue;
            }
            for v in 0..n {
                let t = time[mask * n + v];
                if t >= INF {
                    continue;
                }
                for w in (0..n).filter(|&w| mask & (1 << w) == 0) {
                    let a = t + m.d(v, w);
                    let slot = (mask | 1 << w) * n + w;
                    if a <= m.deadline(w) && a < time[slot] {
                        time[slot] = a;
                        prev[slot] = v as u8;
                    }
                }
            }
        }
        Prefixes { n, time, prev }
    }

    fn path(&self, mut mask: usize, mut v: usize) -> Vec<usize> {
        let mut out = vec![v];
        while self.prev[mask * self.n + v] != u8::MAX {
            let p = self.prev[mask * self.n + v] as usize;
            mask &= !(1 << v);
            v = p;
            out.push(v);
        }
        out.reverse();
        out
    }

    /// Reachable (set, last vertex, arrival), richest sets first.
    fn states(&self) -> Vec<(usize, usize, i64)> {
        let mut out: Vec<(usize, usize, i64)> = (0..self.time.len())
            .filter(|&i| self.time[i] < INF)
            .map(|i| (i / self.n, i % self.n, self.time[i]))
            .collect();
        out.sort_by_key(|&(mask, v, t)| (std::cmp::Reverse(mask.count_ones()), mask, t, v));
        out
    }
}

fn groups_needed(vertices: usize, mu: usize) -> usize {
    (vertices - 1).div_ceil(mu * mu - 2)
}

/// Fixed group over an exact subpath.
pub fn exact_group(m: &MetricInstance, seg: &[usize], mu: usize) -> GroupGuess {
    let w = Walk::new(m, seg.to_vec());
    GroupGuess {
        jumps: jump_positions(seg.len(), mu).into_iter().map(|p| seg[p]).collect(),
        budget: w.length(),
        excess: excess_or_zero(m, &w, mu),
        excess_before_end: excess_or_zero(m, &Walk::new(m, seg[..seg.len() - 1].to_vec()), mu),
        size: seg.len(),
        exact: Some(seg.to_vec()),
        prefix: Vec::new(),
        eligible: Vec::new(),
    }
}

fn exact_groups(m: &MetricInstance, path: &[usize], mu: usize) -> Vec<GroupGuess> {
    let step = mu * mu - 2;
    let mut out = Vec::new();
    let mut from = 0;
    while from + 1 < path.len() {
        let to = (from + step).min(path.len() - 1);
        out.push(exact_group(m, &path[from..=to], mu));
        from = to;
    }
    out
}

fn finish(m: &MetricInstance, s: usize, cfg: &EnumConfig, groups: Vec<GroupGuess>) -> DeadlineGuess {
    let mut breakpoints = vec![s];
    breakpoints.extend(groups.iter().map(GroupGuess::end));
    let mut g = DeadlineGuess { start: s, mu: cfg.mu, order: cfg.order, breakpoints, groups };
    eligible_sets(m, &mut g);
    g
}

struct LargeSearch<'a, 'v> {
    m: &'a MetricInstance,
    s: usize,
    cfg: &'a EnumConfig,
    stats: &'a mut EnumStats,
    visit: &'v mut dyn FnMut(&DeadlineGuess) -> bool,
    stopped: bool,
}

impl LargeSearch<'_, '_> {
    fn emit(&mut self, groups: &[GroupGuess]) {
        if self.stats.large_skeletons >= self.cfg.max_guesses {
            self.stats.capped = true;
            self.stopped = true;
            return;
        }
        self.stats.large_skeletons += 1;
        let g = finish(self.m, self.s, self.cfg, groups.to_vec());
        if !(self.visit)(&g) {
            self.stopped = true;
        }
    }

    /// Excess values to try for group `i`, in ticks, up to `limit`.
    fn excess_grid(&self, i: usize, last: bool, limit: i64) -> Vec<i64> {
        let mut out = Vec::new();
        if last || self.cfg.order == ExcessOrder::Two {
            out.push(0);
        }
        let limit = limit.min(self.m.diameter_ticks().saturating_mul(self.m.n() as i64));
        let step = Q::from_integer(1) + self.cfg.eps;
        let mut e = self.m.normalized_floor_ticks(&alpha_pow(&self.cfg.eps, i)) + 1;
        while e <= limit {
            out.push(e);
            e = crate::rational::ceil_q(&(step * e)).max(e + 1);
        }
        out
    }

    fn extend(&mut self, groups: &mut Vec<GroupGuess>, used: u32, remaining: usize) {
        if self.stopped {
            return;
        }
        if remaining == 0 {
            self.emit(groups);
            return;
        }
        let (mu, n) = (self.cfg.mu, self.m.n());
        let v = groups.last().map_or(self.s, GroupGuess::end);
        let before: i64 = groups.iter().map(|g| g.budget).sum();
        let i = groups.len();
        let free = n - used.count_ones() as usize;
        // a large group has at least μ² vertices, μ − 1 of them new jump nodes
        if free + 1 < mu * mu {
            return;
        }
        let mut chain = vec![v];
        self.jumps(groups, used | 1 << v, &mut chain, before, i, remaining);
    }

    fn jumps(&mut self, groups: &mut Vec<GroupGuess>, used: u32, chain: &mut Vec<usize>, before: i64, i: usize, remaining: usize) {
        let (m, mu, n) = (self.m, self.cfg.mu, self.m.n());
        let arrive = before + m.seq_len(chain);
        if chain.len() == mu {
            let end = *chain.last().expect("chain");
            let last = remaining == 1;
            for e in self.excess_grid(i, last, m.deadline(end).saturating_sub(arrive)) {
                if self.stopped {
                    return;
                }
                groups.push(GroupGuess {
                    jumps: chain.clone(),
                    budget: m.seq_len(chain) + e,
                    excess: e,
                    excess_before_end: e,
                    size: 0,
                    exact: None,
                    prefix: Vec::new(),
                    eligible: Vec::new(),
                });
                self.extend(groups, used, remaining - 1);
                groups.pop();
            }
            return;
        }
        let tail = *chain.last().expect("chain");
        for w in (0..n).filter(|&w| used & (1 << w) == 0) {
            if arrive + m.d(tail, w) > m.deadline(w) {
                continue;
            }
            chain.push(w);
            self.jumps(groups, used | 1 << w, chain, before, i, remaining);
            chain.pop();
            if self.stopped {
                return;
            }
        }
    }
}

/// Streams skeletons to `visit` until it returns false or the caps bind.
/// With `known_path`, emits exactly the skeleton that path induces.
pub fn enumerate_guesses(
    m: &MetricInstance,
    s: usize,
    cfg: &EnumConfig,
    known_path: Option<&[usize]>,
    visit: &mut dyn FnMut(&DeadlineGuess) -> bool,
) -> EnumStats {
    let mut stats = EnumStats::default();
    if let Some(path) = known_path {
        let g = guess_from_path(m, path, &cfg.eps, cfg.mu, cfg.order, cfg.m_max, cfg.exact_small_groups);
        stats.small_skeletons = 1;
        visit(&g);
        return stats;
    }
    let mu = cfg.mu;
    let max_vertices = (cfg.m_max * (mu * mu - 2) + 1).min(m.n());
    let pre = Prefixes::build(m, s, max_vertices);
    let states = pre.states();

    stats.small_skeletons += 1;
    if !visit(&finish(m, s, cfg, Vec::new())) {
        return stats;
    }
    let mut stopped = false;
    for level in 1..=cfg.m_max {
        // small-only skeletons, one per visited set
        let mut last_mask = usize::MAX;
        for &(mask, v, _) in &states {
            if mask == last_mask {
                continue;
            }
            last_mask = mask;
            let k = mask.count_ones() as usize;
            if k < 2 || groups_needed(k, mu) != level {
                continue;
            }
            stats.small_skeletons += 1;
            let path = pre.path(mask, v);
            if !visit(&finish(m, s, cfg, exact_groups(m, &path, mu))) {
                return stats;
            }
        }
        // skeletons ending in large groups, from the bare start first
        let mut search = LargeSearch { m, s, cfg, stats: &mut stats, visit, stopped: false };
        let bases = std::iter::once((1usize << s, s)).chain(states.iter().filter(|st| st.0 != 1 << s).map(|st| (st.0, st.1)));
        for (mask, v) in bases {
            let path = pre.path(mask, v);
            let mut groups = exact_groups(m, &path, mu);
            if groups.len() >= level {
                continue;
            }
            let remaining = level - groups.len();
            search.extend(&mut groups, mask as u32, remaining);
            if search.stopped {
                stopped = true;
                break;
            }
        }
        if stopped {
            break;
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m_max: usize) -> EnumConfig {
        EnumConfig { eps: Q::new(1, 2), mu: 3, order: ExcessOrder::Mu, m_max, max_guesses: 1000, exact_small_groups: true }
    }

    #[test]
    fn small_instances_are_covered_by_exact_prefixes() {
        let m = MetricInstance::uniform(5).with_deadlines(&[Some(Q::from_integer(0)), None, None, Some(Q::from_integer(1)), None]);
        let mut best = 0;
        let stats = enumerate_guesses(&m, 0, &cfg(3), None, &mut |g| {
            let size: usize = 1 + g.groups.iter().map(|x| x.size - 1).sum::<usize>();
            best = best.max(size);
            true
        });
        assert_eq!(best, 5);
        assert_eq!(stats.large_skeletons, 0);
        assert!(!stats.capped);
    }

    #[test]
    fn known_path_emits_one_skeleton() {
        let m = MetricInstance::uniform(4);
        let mut seen = Vec::new();
        enumerate_guesses(&m, 0, &cfg(3), Some(&[0, 1, 2, 3]), &mut |g| {
            seen.push(g.clone());
            true
        });
        assert_eq!(seen.len(), 1);
        assert_eq!(seen[0].breakpoints, vec![0, 3]);
    }

    #[test]
    fn large_groups_respect_the_cap() {
        let m = MetricInstance::uniform(11);
        let mut c = cfg(2);
        c.max_guesses = 7;
        let stats = enumerate_guesses(&m, 0, &c, None, &mut |_| true);
        assert!(stats.capped);
        assert_eq!(stats.large_skeletons, 7);
    }
}
