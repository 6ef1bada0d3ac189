//! Brute-force reference solvers over the metric completion.

use crate::error::{PathError, SolveError};
use crate::metric::{MetricInstance, INF};
use crate::path::{Jump, Walk};
use std::time::{Duration, Instant};

pub const MAX_STROLL_N: usize = 16;
pub const MAX_DEADLINE_N: usize = 14;
pub const MAX_JUMP_LEN: usize = 12;

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Length in ticks for k-stroll, prize for orienteering and deadlines.
    pub value: i64,
    pub witness: Walk,
    pub explored: u64,
    pub elapsed: Duration,
}

/// Shortest simple paths from `s` over every visited set: `len[mask * n + v]`.
struct PathTable {
    n: usize,
    len: Vec<i64>,
    parent: Vec<u8>,
}

impl PathTable {
    fn build(m: &MetricInstance, s: usize) -> Self {
        let n = m.n();
        let size = 1usize << n;
        let mut len = vec![INF; size * n];
        let mut parent = vec![u8::MAX; size * n];
        len[(1 << s) * n + s] = 0;
        for mask in 1..size {
            if mask & (1 << s) == 0 {
                continue;
            }
            for v in 0..n {
                let cur = len[mask * n + v];
                if cur >= INF {
                    continue;
                }
                for u in 0..n {
                    if mask & (1 << u) != 0 {
                        continue;
                    }
                    let nm = mask | (1 << u);
                    let cand = cur + m.d(v, u);
                    if cand < len[nm * n + u] {
                        len[nm * n + u] = cand;
                        parent[nm * n + u] = v as u8;
                    }
                }
            }
        }
        PathTable { n, len, parent }
    }

    fn at(&self, mask: usize, v: usize) -> i64 {
        self.len[mask * self.n + v]
    }

    fn explored(&self) -> u64 {
        self.len.iter().filter(|&&x| x < INF).count() as u64
    }

    fn trace(&self, mut mask: usize, mut v: usize) -> Vec<usize> {
        let mut seq = vec![v];
        while mask.count_ones() > 1 {
            let p = self.parent[mask * self.n + v] as usize;
            mask &= !(1 << v);
            v = p;
            seq.push(v);
        }
        seq.reverse();
        seq
    }

    /// Best closing cost for a visited set: ending at `t`, or back at `s` when `s == t`.
    fn close(&self, m: &MetricInstance, mask: usize, s: usize, t: usize) -> Option<(i64, Vec<usize>)> {
        if s != t {
            let l = self.at(mask, t);
            return (l < INF).then(|| (l, self.trace(mask, t)));
        }
        if mask == 1 << s {
            return Some((0, vec![s]));
        }
        let mut best: Option<(i64, usize)> = None;
        for v in 0..self.n {
            if v == s || mask & (1 << v) == 0 {
                continue;
            }
            let l = self.at(mask, v);
            if l >= INF {
                continue;
            }
            let c = l + m.d(v, s);
            if best.is_none_or(|(b, _)| c < b) {
                best = Some((c, v));
            }
        }
        best.map(|(c, v)| {
            let mut seq = self.trace(mask, v);
            seq.push(s);
            (c, seq)
        })
    }
}

fn check_n(m: &MetricInstance, max: usize) -> Result<(), SolveError> {
    if m.n() > max {
        return Err(SolveError::TooLarge { n: m.n(), max });
    }
    Ok(())
}

/// Shortest s–t path visiting at least `k` distinct vertices (a tour when s = t).
pub fn exact_kstroll(m: &MetricInstance, s: usize, t: usize, k: usize) -> Result<OracleResult, SolveError> {
    check_n(m, MAX_STROLL_N)?;
    if k > m.n() {
        return Err(SolveError::TargetTooLarge { k, n: m.n() });
    }
    let clock = Instant::now();
    let table = PathTable::build(m, s);
    let mut best: Option<(i64, Vec<usize>)> = None;
    for mask in 1..(1usize << m.n()) {
        if mask & (1 << s) == 0 || mask & (1 << t) == 0 || (mask.count_ones() as usize) < k {
            continue;
        }
        if let Some((l, seq)) = table.close(m, mask, s, t) {
            if best.as_ref().is_none_or(|(b, _)| l < *b) {
                best = Some((l, seq));
            }
        }
    }
    let (value, seq) = best.ok_or_else(|| SolveError::Infeasible("no path".into()))?;
    Ok(OracleResult { value, witness: Walk::new(m, seq), explored: table.explored(), elapsed: clock.elapsed() })
}

/// Most distinct vertices on an s–t path of length at most `budget` ticks.
pub fn exact_p2p(
    m: &MetricInstance,
    s: usize,
    t: usize,
    budget: i64,
    exclude_endpoints: bool,
) -> Result<OracleResult, SolveError> {
    check_n(m, MAX_STROLL_N)?;
    if budget < m.d(s, t) {
        return Err(SolveError::Infeasible(format!("budget below d(s,t) = {}", m.d(s, t))));
    }
    let clock = Instant::now();
    let table = PathTable::build(m, s);
    let ends = (1usize << s) | (1usize << t);
    let mut best: Option<(i64, i64, Vec<usize>)> = None;
    for mask in 1..(1usize << m.n()) {
        if mask & ends != ends {
            continue;
        }
        if let Some((l, seq)) = table.close(m, mask, s, t) {
            if l > budget {
                continue;
            }
            let mut prize = mask.count_ones() as i64;
            if exclude_endpoints {
                prize -= ends.count_ones() as i64;
            }
            if best.as_ref().is_none_or(|(p, bl, _)| prize > *p || (prize == *p && l < *bl)) {
                best = Some((prize, l, seq));
            }
        }
    }
    let (value, _, seq) = best.expect("the direct path fits the budget");
    Ok(OracleResult { value, witness: Walk::new(m, seq), explored: table.explored(), elapsed: clock.elapsed() })
}

/// Most vertices reachable by their deadlines on a walk from `s`.
/// The start counts iff its own deadline is nonnegative.
pub fn exact_deadline(m: &MetricInstance, s: usize) -> Result<OracleResult, SolveError> {
    check_n(m, MAX_DEADLINE_N)?;
    let clock = Instant::now();
    let n = m.n();
    let size = 1usize << n;
    let mut arr = vec![INF; size * n];
    let mut parent = vec![u8::MAX; size * n];
    arr[(1 << s) * n + s] = 0;
    let mut best = (1usize << s, s);
    let score = |mask: usize| mask.count_ones() as i64 - i64::from(m.deadline(s) < 0);
    for mask in 1..size {
        if mask & (1 << s) == 0 {
            continue;
        }
        for v in 0..n {
            let cur = arr[mask * n + v];
            if cur >= INF {
                continue;
            }
            let (bm, bv) = best;
            if score(mask) > score(bm) || (score(mask) == score(bm) && cur < arr[bm * n + bv]) {
                best = (mask, v);
            }
            for u in 0..n {
                if mask & (1 << u) != 0 {
                    continue;
                }
                let a = cur + m.d(v, u);
                if a > m.deadline(u) {
                    continue;
                }
                let idx = (mask | (1 << u)) * n + u;
                if a < arr[idx] {
                    arr[idx] = a;
                    parent[idx] = v as u8;
                }
            }
        }
    }
    let (mut mask, mut v) = best;
    let value = score(mask);
    let mut seq = vec![v];
    while mask.count_ones() > 1 {
        let p = parent[mask * n + v] as usize;
        mask &= !(1 << v);
        v = p;
        seq.push(v);
    }
    seq.reverse();
    let explored = arr.iter().filter(|&&x| x < INF).count() as u64;
    Ok(OracleResult { value, witness: Walk::new(m, seq), explored, elapsed: clock.elapsed() })
}

/// Longest μ-jump by enumerating every interior position subset.
pub fn exact_mu_jump(m: &MetricInstance, w: &Walk, mu: usize) -> Result<Jump, PathError> {
    let len = w.len();
    if len > MAX_JUMP_LEN {
        return Err(PathError::TooLong { len, max: MAX_JUMP_LEN });
    }
    if len == 0 {
        return Err(PathError::Empty);
    }
    if mu < 2 || mu > len {
        return Err(PathError::JumpSize { mu, len });
    }
    let v = w.vertices();
    let mut best: Option<Jump> = None;
    // masks over interior positions, visited in lexicographic order of position lists
    let mut combos: Vec<Vec<usize>> = Vec::new();
    let inner = len.saturating_sub(2);
    for mask in 0u32..(1u32 << inner) {
        if mask.count_ones() as usize != mu - 2 {
            continue;
        }
        let mut pos = vec![0];
        pos.extend((0..inner).filter(|i| mask & (1 << i) != 0).map(|i| i + 1));
        pos.push(len - 1);
        combos.push(pos);
    }
    combos.sort();
    for pos in combos {
        let l: i64 = pos.windows(2).map(|p| m.d(v[p[0]], v[p[1]])).sum();
        if best.as_ref().is_none_or(|b| l > b.length) {
            best = Some(Jump { positions: pos, length: l });
        }
    }
    Ok(best.expect("at least one jump"))
}

/// Arrival time of every first visit along a vertex sequence.
pub fn first_arrivals(m: &MetricInstance, seq: &[usize]) -> Vec<(usize, i64)> {
    let mut seen = vec![false; m.n()];
    let mut t = 0;
    let mut out = Vec::new();
    for (i, &v) in seq.iter().enumerate() {
        if i > 0 {
            t += m.d(seq[i - 1], v);
        }
        if !seen[v] {
            seen[v] = true;
            out.push((v, t));
        }
    }
    out
}

/// On-time count of a walk from `s` under the metric's deadlines.
pub fn on_time_count(m: &MetricInstance, seq: &[usize]) -> i64 {
    first_arrivals(m, seq).iter().filter(|(v, t)| *t <= m.deadline(*v)).count() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Q;

    #[test]
    fn kstroll_small_cases() {
        let u = MetricInstance::uniform(5);
        assert_eq!(exact_kstroll(&u, 0, 1, 2).unwrap().value, 1);
        assert_eq!(exact_kstroll(&u, 0, 1, 5).unwrap().value, 4);
        assert!(exact_kstroll(&u, 0, 1, 6).is_err());
    }

    #[test]
    fn p2p_small_cases() {
        let u = MetricInstance::uniform(5);
        assert!(exact_p2p(&u, 0, 1, 0, false).unwrap_err().is_infeasible());
        assert_eq!(exact_p2p(&u, 0, 1, 100, false).unwrap().value, 5);
        assert_eq!(exact_p2p(&u, 0, 1, 3, false).unwrap().value, 4);
    }

    #[test]
    fn deadline_small_cases() {
        let u = MetricInstance::uniform(5);
        let all = u.clone().with_deadlines(&[None, None, None, None, None]);
        assert_eq!(exact_deadline(&all, 0).unwrap().value, 5);
        let tight: Vec<Option<Q>> = (0..5).map(|i| Some(Q::new(i64::from(i == 0), 2))).collect();
        let none = u.with_deadlines(&tight);
        assert_eq!(exact_deadline(&none, 0).unwrap().value, 1);
    }

    #[test]
    fn jump_enumeration_extremes() {
        let u = MetricInstance::uniform(6);
        let w = Walk::new(&u, vec![0, 1, 2, 3, 4]);
        assert_eq!(exact_mu_jump(&u, &w, 2).unwrap().positions, vec![0, 4]);
        assert_eq!(exact_mu_jump(&u, &w, 5).unwrap().length, 4);
    }
}
