//! Multiple groups-legs orienteering for one skeleton guess.
//!
//! Every leg (i, j) is a walk between consecutive jump nodes of group i that
//! may only credit vertices of its eligible set. Group i's legs share the
//! budget `⌊B_i − ε·E_i⌋`. Small groups keep their fixed subpath.

use super::guess::DeadlineGuess;
use crate::doubling::{DoublingSolver, Mask};
use crate::metric::{MetricInstance, INF};
use crate::rational::Q;
use crate::treewidth::{profile_dp, Graph, PathSpec, RootedDecomposition};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct MglPlan {
    /// concatenated walk from the start
    pub walk: Vec<usize>,
    /// legs per group, each a vertex sequence between jump nodes
    pub legs: Vec<Vec<Vec<usize>>>,
    /// vertices credited by the legs plus the fixed vertices
    pub credited: usize,
}

fn bit(v: usize) -> Mask {
    1 << v
}

fn submasks(u: Mask) -> impl Iterator<Item = Mask> {
    let mut next = Some(u);
    std::iter::from_fn(move || {
        let cur = next?;
        next = (cur != 0).then(|| (cur - 1) & u);
        Some(cur)
    })
}

/// Vertices no leg may credit: the start, jump nodes and small groups' subpaths.
fn fixed_vertices(guess: &DeadlineGuess) -> Vec<usize> {
    let mut fixed = vec![guess.start];
    for g in &guess.groups {
        fixed.extend(&g.jumps);
        if let Some(p) = &g.exact {
            fixed.extend(p);
        }
    }
    fixed.sort_unstable();
    fixed.dedup();
    fixed
}

fn concat(guess: &DeadlineGuess, legs: &[Vec<Vec<usize>>]) -> Vec<usize> {
    let mut walk = vec![guess.start];
    for (g, gl) in guess.groups.iter().zip(legs) {
        match &g.exact {
            Some(p) => walk.extend(&p[1..]),
            None => gl.iter().for_each(|l| walk.extend(&l[1..])),
        }
    }
    walk
}

fn fixed_credit(m: &MetricInstance, guess: &DeadlineGuess) -> usize {
    let mut hit = vec![false; m.n()];
    hit[guess.start] = m.deadline(guess.start) >= 0;
    for g in &guess.groups {
        if let Some(p) = &g.exact {
            p.iter().for_each(|&v| hit[v] = true);
        } else {
            for j in 0..g.legs() {
                let v = g.jumps[j + 1];
                hit[v] |= g.eligible[j][v];
            }
        }
    }
    hit.iter().filter(|&&h| h).count()
}

/// Solves the legs jointly with the doubling tables: each leg's interior set
/// is an exact vertex set, groups take disjoint interiors, and the union of
/// interiors is maximized with ties going to the shorter plan.
pub fn mgl_doubling(solver: &mut DoublingSolver, guess: &DeadlineGuess, eps: &Q) -> Option<MglPlan> {
    let m = solver.m;
    let n = m.n();
    let full: Mask = if n == 32 { Mask::MAX } else { (1 << n) - 1 };
    let free = fixed_vertices(guess).iter().fold(full, |acc, &v| acc & !bit(v));
    let size = 1usize << n;

    // per group: best[S] = shortest legs with interior union S, and leg split choices
    let mut group_best: Vec<Vec<i64>> = Vec::new();
    let mut group_choice: Vec<Vec<Vec<Mask>>> = Vec::new();
    for g in &guess.groups {
        if g.exact.is_some() {
            let mut best = vec![INF; size];
            best[0] = 0;
            group_best.push(best);
            group_choice.push(Vec::new());
            continue;
        }
        let budget = g.reduced_budget(eps);
        let mut acc = vec![INF; size];
        acc[0] = 0;
        let mut choices = Vec::new();
        for j in 0..g.legs() {
            let (a, b) = (g.jumps[j], g.jumps[j + 1]);
            let allowed = (0..n).filter(|&v| g.eligible[j][v]).fold(0, |acc, v| acc | bit(v)) & free;
            let mut leg = vec![INF; size];
            for s in submasks(allowed) {
                leg[s as usize] = if a == b {
                    if s == 0 { 0 } else { INF }
                } else {
                    solver.path_len(a, b, s | bit(a) | bit(b))
                };
            }
            let mut next = vec![INF; size];
            let mut choice = vec![0 as Mask; size];
            for u in submasks(free) {
                for t in submasks(u & allowed) {
                    let (x, y) = (leg[t as usize], acc[(u & !t) as usize]);
                    if x < INF && y < INF && x + y < next[u as usize] && x + y <= budget {
                        next[u as usize] = x + y;
                        choice[u as usize] = t;
                    }
                }
            }
            acc = next;
            choices.push(choice);
        }
        group_best.push(acc);
        group_choice.push(choices);
    }

    // joint[i][U]: groups 0..=i with interiors partitioning U, min total length
    let mut joint: Vec<Vec<i64>> = Vec::new();
    let mut pick: Vec<Vec<Mask>> = Vec::new();
    for (i, best) in group_best.iter().enumerate() {
        let mut cur = vec![INF; size];
        let mut ch = vec![0 as Mask; size];
        for u in submasks(free) {
            if i == 0 {
                cur[u as usize] = best[u as usize];
                ch[u as usize] = u;
                continue;
            }
            let prev = &joint[i - 1];
            for s in submasks(u) {
                let (x, y) = (best[s as usize], prev[(u & !s) as usize]);
                if x < INF && y < INF && x + y < cur[u as usize] {
                    cur[u as usize] = x + y;
                    ch[u as usize] = s;
                }
            }
        }
        joint.push(cur);
        pick.push(ch);
    }

    let mut legs: Vec<Vec<Vec<usize>>> = vec![Vec::new(); guess.m()];
    let mut interior = 0usize;
    if let Some(last) = joint.last() {
        let (_, _, u) = submasks(free)
            .filter(|&u| last[u as usize] < INF)
            .map(|u| (std::cmp::Reverse(u.count_ones()), last[u as usize], u))
            .min()?;
        interior = u.count_ones() as usize;
        let mut rest = u;
        for i in (0..guess.m()).rev() {
            let s = pick[i][rest as usize];
            rest &= !s;
            let g = &guess.groups[i];
            if g.exact.is_some() {
                continue;
            }
            let mut left = s;
            let mut seqs = Vec::new();
            for j in (0..g.legs()).rev() {
                let t = group_choice[i][j][left as usize];
                left &= !t;
                let (a, b) = (g.jumps[j], g.jumps[j + 1]);
                seqs.push(if a == b { vec![a] } else { solver.path(a, b, t | bit(a) | bit(b)) });
            }
            seqs.reverse();
            legs[i] = seqs;
        }
    }
    Some(MglPlan { walk: concat(guess, &legs), legs, credited: interior + fixed_credit(m, guess) })
}

/// Treewidth variant: groups are solved in order with the profile DP, one
/// walk per leg; later groups cannot credit what earlier ones did.
pub fn mgl_treewidth(
    m: &MetricInstance,
    graph: &Graph,
    rooted: &RootedDecomposition,
    guess: &DeadlineGuess,
    eps: &Q,
) -> Option<MglPlan> {
    let n = m.n();
    let mut blocked = vec![false; n];
    fixed_vertices(guess).into_iter().for_each(|v| blocked[v] = true);
    let mut legs = vec![Vec::new(); guess.m()];
    let mut interior = 0;
    for (i, g) in guess.groups.iter().enumerate() {
        if g.exact.is_some() || g.legs() == 0 {
            continue;
        }
        let specs: Vec<PathSpec> = (0..g.legs())
            .map(|j| PathSpec {
                s: g.jumps[j],
                t: g.jumps[j + 1],
                eligible: (0..n).map(|v| g.eligible[j][v] && !blocked[v]).collect(),
            })
            .collect();
        let table = profile_dp(graph, rooted, &specs, n).ok()?;
        let count = table.max_count_within(g.reduced_budget(eps))?;
        let walks = table.witness(count)?;
        for w in &walks {
            for &v in w {
                blocked[v] = true;
            }
        }
        interior += count;
        legs[i] = walks;
    }
    Some(MglPlan { walk: concat(guess, &legs), legs, credited: interior + fixed_credit(m, guess) })
}

/// Credited vertices whose arrival inside their group breaks
/// `Q_i(v_i, v) ≤ J_i(v_i, u^j) + (1 − ε)·E'_i`.
pub fn prefix_violations(m: &MetricInstance, guess: &DeadlineGuess, plan: &MglPlan, eps: &Q) -> usize {
    let mut bad = 0;
    for (g, gl) in guess.groups.iter().zip(&plan.legs) {
        if g.exact.is_some() {
            continue;
        }
        let slack = (Q::from_integer(1) - eps) * Q::from_integer(g.excess_before_end);
        let base = g.prefix.first().copied().unwrap_or(0);
        let mut t = 0;
        for (j, leg) in gl.iter().enumerate() {
            let bound = Q::from_integer(g.prefix[j] - base) + slack;
            for w in leg.windows(2) {
                t += m.d(w[0], w[1]);
                let v = w[1];
                if g.eligible[j][v] && !g.jumps.contains(&v) && Q::from_integer(t) > bound {
                    bad += 1;
                }
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deadline::guess::{guess_from_path, ExcessOrder};
    use crate::doubling::SolverConfig;
    use crate::oracle;

    #[test]
    fn submask_enumeration_is_complete() {
        assert_eq!(submasks(0b101).collect::<Vec<_>>(), vec![0b101, 0b100, 0b001, 0]);
        assert_eq!(submasks(0).count(), 1);
    }

    #[test]
    fn known_skeleton_keeps_every_vertex_when_deadlines_are_loose() {
        let pts: Vec<Vec<i64>> = (0..7).map(|i| vec![i]).collect();
        let m = MetricInstance::from_points(&pts).unwrap();
        let m = m.with_deadlines(&[Some(Q::from_integer(100)); 7]);
        let opt = oracle::exact_deadline(&m, 0).unwrap();
        let eps = Q::new(1, 2);
        let guess = guess_from_path(&m, opt.witness.vertices(), &eps, 3, ExcessOrder::Mu, 4, false);
        let mut solver = DoublingSolver::new(&m, &SolverConfig::default()).unwrap();
        let plan = mgl_doubling(&mut solver, &guess, &eps).unwrap();
        assert_eq!(plan.credited, 7);
        assert_eq!(oracle::on_time_count(&m, &plan.walk), 7);
    }
}
