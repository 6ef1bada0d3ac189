//! Skeletons of deadline walks: breakpoints, jump nodes, budgets and
//! eligibility thresholds.

use crate::metric::MetricInstance;
use crate::path::{equal_size_positions, excess_or_zero, jump_prefix, regret, Jump, Walk};
use crate::rational::Q;
use serde::Serialize;

/// Which excess drives the breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExcessOrder {
    /// the 2-excess, for the treewidth solver
    Two,
    /// the μ-excess, for the doubling solver
    Mu,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupGuess {
    /// jump nodes, first and last are the group's breakpoints
    pub jumps: Vec<usize>,
    /// total leg budget in ticks
    pub budget: i64,
    /// μ-excess of the whole group, ticks
    pub excess: i64,
    /// μ-excess of the group without its last vertex, ticks
    pub excess_before_end: i64,
    /// vertex count of the group's subpath
    pub size: usize,
    /// fixed subpath for small groups
    pub exact: Option<Vec<usize>>,
    /// earliest possible arrival at each leg's start
    pub prefix: Vec<i64>,
    /// eligibility per leg
    pub eligible: Vec<Vec<bool>>,
}

impl GroupGuess {
    pub fn start(&self) -> usize {
        self.jumps[0]
    }

    pub fn end(&self) -> usize {
        *self.jumps.last().expect("nonempty jumps")
    }

    pub fn legs(&self) -> usize {
        self.jumps.len() - 1
    }

    /// Budget after the excess saving, `⌊B − ε·E⌋`.
    pub fn reduced_budget(&self, eps: &Q) -> i64 {
        crate::rational::floor_q(&(Q::from_integer(self.budget) - *eps * Q::from_integer(self.excess)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeadlineGuess {
    pub start: usize,
    pub mu: usize,
    pub order: ExcessOrder,
    /// v_0 = start, v_1, …, v_m
    pub breakpoints: Vec<usize>,
    pub groups: Vec<GroupGuess>,
}

impl DeadlineGuess {
    pub fn m(&self) -> usize {
        self.groups.len()
    }
}

/// α^i as an exact rational, α = 1 + ε.
pub fn alpha_pow(eps: &Q, i: usize) -> Q {
    let alpha = Q::from_integer(1) + eps;
    (0..i).fold(Q::from_integer(1), |acc, _| acc * alpha)
}

fn excess(m: &MetricInstance, seq: &[usize], order: ExcessOrder, mu: usize) -> i64 {
    match order {
        ExcessOrder::Two => regret(m, seq),
        ExcessOrder::Mu => excess_or_zero(m, &Walk::new(m, seq.to_vec()), mu),
    }
}

/// Breakpoint indices along `path`: each next one is the first index whose
/// segment excess exceeds α^i; the last group takes the remainder once
/// `m_max` groups exist.
pub fn breakpoint_indices(
    m: &MetricInstance,
    path: &[usize],
    eps: &Q,
    mu: usize,
    order: ExcessOrder,
    m_max: usize,
) -> Vec<usize> {
    let mut idx = vec![0usize];
    let last = path.len().saturating_sub(1);
    while *idx.last().expect("nonempty") < last {
        let i = idx.len() - 1;
        let from = idx[i];
        if i + 1 >= m_max {
            idx.push(last);
            break;
        }
        let threshold = alpha_pow(eps, i);
        let next = (from + 1..=last)
            .find(|&q| m.normalized(excess(m, &path[from..=q], order, mu)) > threshold)
            .unwrap_or(last);
        idx.push(next);
    }
    idx
}

/// Positions of the group's jump nodes inside its subpath.
pub fn jump_positions(k: usize, mu: usize) -> Vec<usize> {
    if k >= mu {
        equal_size_positions(k, mu).expect("k >= mu")
    } else {
        (0..k).collect()
    }
}

/// Leg thresholds and eligibility of every group, from their budgets.
pub fn eligible_sets(m: &MetricInstance, guess: &mut DeadlineGuess) {
    let mut before = 0i64;
    for g in &mut guess.groups {
        let chain = Walk::new(m, g.jumps.clone());
        let jump = Jump { positions: (0..g.jumps.len()).collect(), length: chain.length() };
        g.prefix = (0..g.legs()).map(|j| before + jump_prefix(m, &chain, &jump, j)).collect();
        g.eligible = g.prefix.iter().map(|&l| (0..m.n()).map(|v| m.deadline(v) >= l).collect()).collect();
        before += g.budget;
    }
}

/// The skeleton induced by a known walk.
pub fn guess_from_path(
    m: &MetricInstance,
    path: &[usize],
    eps: &Q,
    mu: usize,
    order: ExcessOrder,
    m_max: usize,
    small_groups_exact: bool,
) -> DeadlineGuess {
    let bps = breakpoint_indices(m, path, eps, mu, order, m_max);
    let mut groups = Vec::new();
    for w in bps.windows(2) {
        let seg = &path[w[0]..=w[1]];
        let k = seg.len();
        let jumps = jump_positions(k, mu).into_iter().map(|p| seg[p]).collect();
        groups.push(GroupGuess {
            jumps,
            budget: m.seq_len(seg),
            excess: excess(m, seg, ExcessOrder::Mu, mu),
            excess_before_end: excess(m, &seg[..k - 1], ExcessOrder::Mu, mu),
            size: k,
            exact: (small_groups_exact && k < mu * mu).then(|| seg.to_vec()),
            prefix: Vec::new(),
            eligible: Vec::new(),
        });
    }
    let mut guess = DeadlineGuess {
        start: path[0],
        mu,
        order,
        breakpoints: bps.iter().map(|&i| path[i]).collect(),
        groups,
    };
    eligible_sets(m, &mut guess);
    guess
}

/// Smallest tick count whose normalized length exceeds α^i.
pub fn min_excess_ticks(m: &MetricInstance, eps: &Q, i: usize) -> i64 {
    m.normalized_floor_ticks(&alpha_pow(eps, i)) + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[i64]) -> MetricInstance {
        MetricInstance::from_points(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn straight_path_is_one_group() {
        let m = line(&[0, 1, 2, 3, 4]);
        let g = guess_from_path(&m, &[0, 1, 2, 3, 4], &Q::new(1, 2), 3, ExcessOrder::Mu, 4, false);
        assert_eq!(g.m(), 1);
        assert_eq!(g.groups[0].jumps, vec![0, 2, 4]);
        assert_eq!(g.groups[0].excess, 0);
    }

    #[test]
    fn prefix_bounds_follow_budgets_and_jumps() {
        let m = line(&[0, 1, 2, 3, 4, 5, 6]);
        // zigzag forces breakpoints
        let path = [0, 3, 1, 4, 2, 6, 5];
        let eps = Q::new(1, 2);
        let g = guess_from_path(&m, &path, &eps, 3, ExcessOrder::Two, 4, false);
        let mut before = 0;
        for grp in &g.groups {
            assert_eq!(grp.prefix[0], before);
            if grp.legs() > 1 {
                assert_eq!(grp.prefix[1], before + m.d(grp.jumps[0], grp.jumps[1]));
            }
            before += grp.budget;
        }
        assert_eq!(before, m.seq_len(&path));
        assert_eq!(g.breakpoints[0], 0);
        assert_eq!(*g.breakpoints.last().unwrap(), 5);
    }

    #[test]
    fn eligibility_is_a_closed_threshold() {
        let m = line(&[0, 1, 2]).with_deadlines(&[None, Some(Q::from_integer(1)), Some(Q::from_integer(0))]);
        let g = guess_from_path(&m, &[0, 1, 2], &Q::new(1, 2), 2, ExcessOrder::Mu, 4, false);
        let grp = &g.groups[0];
        assert_eq!(grp.prefix, vec![0]);
        assert_eq!(grp.eligible[0], vec![true, true, true]);
        let mut late = g.clone();
        late.groups[0].jumps = vec![0, 1, 2];
        eligible_sets(&m, &mut late);
        assert_eq!(late.groups[0].prefix, vec![0, 1]);
        assert_eq!(late.groups[0].eligible[1], vec![true, true, false]);
    }
}
