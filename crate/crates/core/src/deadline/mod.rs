//! Deadline TSP: skeleton guessing, multiple groups-legs orienteering,
//! concatenation and re-simulation.

pub mod bicriteria;
pub mod enumerate;
pub mod guess;
pub mod mgl;

pub use bicriteria::{bicriteria_round, solve_deadline_bicriteria, BicriteriaSolution, Rounded};
pub use enumerate::{enumerate_guesses, EnumConfig, EnumStats, MAX_ENUM_N};
pub use guess::{eligible_sets, guess_from_path, DeadlineGuess, ExcessOrder, GroupGuess};
pub use mgl::{mgl_doubling, mgl_treewidth, prefix_violations, MglPlan};

use crate::doubling::{default_mu, DoublingSolver, SolverConfig};
use crate::error::SolveError;
use crate::metric::MetricInstance;
use crate::oracle;
use crate::path::Walk;
use crate::rational::Q;
use crate::treewidth::{prepare, TreeDecomposition};
use serde::Serialize;

#[derive(Debug, Clone, Default)]
pub struct DeadlineOptions {
    /// solve only the skeleton of this walk instead of enumerating
    pub known_path: Option<Vec<usize>>,
    /// derive `known_path` from the exact oracle
    pub oracle_guess: bool,
    /// keep small groups of a known path as fixed subpaths
    pub exact_small_groups: bool,
    /// the start does not count towards the on-time total
    pub exclude_start: bool,
    /// accept non-integer inputs (rounded instances)
    pub allow_rational: bool,
    /// keep every candidate's re-simulation in the solution
    pub keep_candidates: bool,
}

/// Re-simulated walk: first arrivals and the vertices that make their deadline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verified {
    pub walk: Vec<usize>,
    pub length: i64,
    /// (vertex, first arrival in ticks)
    pub arrivals: Vec<(usize, i64)>,
    pub on_time: Vec<usize>,
}

impl Verified {
    pub fn count(&self) -> usize {
        self.on_time.len()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeadlineSolution {
    pub walk: Walk,
    pub on_time: usize,
    pub verified: Verified,
    /// vertices the winning plan claimed before re-simulation
    pub credited: usize,
    /// groups in the winning skeleton
    pub groups: usize,
    pub stats: EnumStats,
    /// skeletons whose plans were re-simulated
    pub candidates: usize,
    /// credited vertices that broke the prefix bound in the winning plan
    pub prefix_violations: usize,
    pub certified: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub candidate_log: Vec<Verified>,
}

/// Joins a plan's legs into one walk and re-simulates it from scratch.
pub fn concatenate_and_verify(m: &MetricInstance, guess: &DeadlineGuess, plan: &MglPlan, exclude_start: bool) -> Result<Verified, SolveError> {
    for (g, legs) in guess.groups.iter().zip(&plan.legs) {
        if g.exact.is_some() {
            continue;
        }
        if legs.len() != g.legs() {
            return Err(SolveError::Config(format!("group starting at {} has {} legs, expected {}", g.start(), legs.len(), g.legs())));
        }
        for (j, leg) in legs.iter().enumerate() {
            if leg.first() != Some(&g.jumps[j]) || leg.last() != Some(&g.jumps[j + 1]) {
                return Err(SolveError::Config(format!("leg {j} of group starting at {} does not chain", g.start())));
            }
        }
    }
    if plan.walk.first() != Some(&guess.start) {
        return Err(SolveError::Config("walk does not begin at the start".into()));
    }
    Ok(verify_walk(m, &plan.walk, exclude_start))
}

/// First-arrival simulation of an arbitrary walk.
pub fn verify_walk(m: &MetricInstance, walk: &[usize], exclude_start: bool) -> Verified {
    let arrivals = oracle::first_arrivals(m, walk);
    let on_time = arrivals
        .iter()
        .enumerate()
        .filter(|&(i, &(v, t))| t <= m.deadline(v) && !(exclude_start && i == 0))
        .map(|(_, &(v, _))| v)
        .collect();
    Verified { walk: walk.to_vec(), length: m.seq_len(walk), arrivals, on_time }
}

fn trivial_plan(guess: &DeadlineGuess) -> Option<MglPlan> {
    guess.groups.iter().all(|g| g.exact.is_some()).then(|| {
        let mut walk = vec![guess.start];
        for g in &guess.groups {
            walk.extend(&g.exact.as_ref().expect("exact")[1..]);
        }
        MglPlan { legs: vec![Vec::new(); guess.m()], credited: walk.len(), walk }
    })
}

struct Best {
    verified: Verified,
    plan: MglPlan,
    guess: DeadlineGuess,
}

fn better(a: &Verified, b: &Verified) -> bool {
    (std::cmp::Reverse(a.count()), a.length, &a.walk) < (std::cmp::Reverse(b.count()), b.length, &b.walk)
}

fn run(
    m: &MetricInstance,
    cfg: &SolverConfig,
    opts: &DeadlineOptions,
    order: ExcessOrder,
    solve: &mut dyn FnMut(&DeadlineGuess) -> Option<MglPlan>,
) -> Result<DeadlineSolution, SolveError> {
    cfg.validate()?;
    if !opts.allow_rational && !m.is_integral() {
        return Err(SolveError::NonInteger("distances or deadlines"));
    }
    if m.deadlines().is_none() {
        return Err(SolveError::Missing("deadlines"));
    }
    let s = m.start;
    let mu = cfg.mu.unwrap_or_else(|| default_mu(&cfg.eps));
    let known = match (&opts.known_path, opts.oracle_guess) {
        (Some(p), _) => Some(p.clone()),
        (None, true) => Some(oracle::exact_deadline(m, s)?.witness.into_vertices()),
        (None, false) => None,
    };
    if known.is_none() && m.n() > MAX_ENUM_N {
        return Err(SolveError::TooLarge { n: m.n(), max: MAX_ENUM_N });
    }
    let ecfg = EnumConfig {
        eps: cfg.eps,
        mu,
        order,
        m_max: cfg.m_max,
        max_guesses: cfg.max_guesses,
        exact_small_groups: opts.exact_small_groups,
    };
    let mut best: Option<Best> = None;
    let mut candidates = 0;
    let mut log = Vec::new();
    let mut failure = None;
    let stats = enumerate_guesses(m, s, &ecfg, known.as_deref(), &mut |guess| {
        let Some(plan) = trivial_plan(guess).or_else(|| solve(guess)) else {
            return true;
        };
        candidates += 1;
        match concatenate_and_verify(m, guess, &plan, opts.exclude_start) {
            Ok(v) => {
                if opts.keep_candidates {
                    log.push(v.clone());
                }
                if best.as_ref().is_none_or(|b| better(&v, &b.verified)) {
                    best = Some(Best { verified: v, plan, guess: guess.clone() });
                }
                true
            }
            Err(e) => {
                failure = Some(e);
                false
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let Best { verified, plan, guess } = best.ok_or_else(|| SolveError::Infeasible("no skeleton admits a plan".into()))?;
    Ok(DeadlineSolution {
        walk: Walk::new(m, verified.walk.clone()),
        on_time: verified.count(),
        credited: plan.credited,
        groups: guess.m(),
        prefix_violations: prefix_violations(m, &guess, &plan, &cfg.eps),
        certified: known.is_none() && !stats.capped,
        stats,
        candidates,
        verified,
        candidate_log: log,
    })
}

/// Deadline TSP on a doubling metric from the metric's start vertex.
pub fn solve_deadline_dbl(m: &MetricInstance, cfg: &SolverConfig, opts: &DeadlineOptions) -> Result<DeadlineSolution, SolveError> {
    let mut solver = DoublingSolver::with_gamma(m, cfg, cfg.gamma.unwrap_or(cfg.gamma_deadline))?;
    let eps = cfg.eps;
    let tables_certified = solver.certified();
    let mut sol = run(m, cfg, opts, ExcessOrder::Mu, &mut |g| mgl_doubling(&mut solver, g, &eps))?;
    sol.certified &= tables_certified;
    Ok(sol)
}

/// Deadline TSP on a graph with a tree decomposition (heuristic when absent).
pub fn solve_deadline_tw(
    m: &MetricInstance,
    td: Option<&TreeDecomposition>,
    cfg: &SolverConfig,
    opts: &DeadlineOptions,
) -> Result<DeadlineSolution, SolveError> {
    let (graph, rooted, _) = prepare(m, td)?;
    let eps: Q = cfg.eps;
    run(m, cfg, opts, ExcessOrder::Two, &mut |g| mgl_treewidth(m, &graph, &rooted, g, &eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[i64]) -> MetricInstance {
        let rows: Vec<Vec<i64>> = xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect();
        MetricInstance::from_int_matrix(&rows).unwrap()
    }

    #[test]
    fn one_edge_leg_on_time_at_its_deadline() {
        let m = line(&[0, 3]).with_deadlines(&[Some(Q::from_integer(0)), Some(Q::from_integer(3))]);
        let v = verify_walk(&m, &[0, 1], false);
        assert_eq!(v.on_time, vec![0, 1]);
    }

    #[test]
    fn revisits_count_once_at_first_arrival() {
        let m = line(&[0, 1, 2]).with_deadlines(&[None, Some(Q::from_integer(1)), None]);
        let v = verify_walk(&m, &[0, 1, 2, 1], false);
        assert_eq!(v.arrivals, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(v.count(), 3);
        assert_eq!(verify_walk(&m, &[0, 1, 2, 1], true).count(), 2);
    }

    #[test]
    fn loose_and_tight_deadlines() {
        let m = line(&[0, 2, 3, 7, 8]);
        let loose = m.clone().with_deadlines(&[Some(Q::from_integer(1000)); 5]);
        let cfg = SolverConfig::default();
        assert_eq!(solve_deadline_dbl(&loose, &cfg, &DeadlineOptions::default()).unwrap().on_time, 5);
        assert_eq!(solve_deadline_tw(&loose, None, &cfg, &DeadlineOptions::default()).unwrap().on_time, 5);
        let mut tight = vec![Some(Q::from_integer(1)); 5];
        tight[0] = Some(Q::from_integer(0));
        let tight = m.with_deadlines(&tight);
        assert_eq!(solve_deadline_dbl(&tight, &cfg, &DeadlineOptions::default()).unwrap().on_time, 1);
        assert_eq!(solve_deadline_tw(&tight, None, &cfg, &DeadlineOptions::default()).unwrap().on_time, 1);
    }

    #[test]
    fn rational_deadlines_are_rejected() {
        let m = line(&[0, 1]).with_deadlines(&[None, Some(Q::new(3, 2))]);
        let err = solve_deadline_dbl(&m, &SolverConfig::default(), &DeadlineOptions::default()).unwrap_err();
        assert!(matches!(err, SolveError::NonInteger(_)));
    }
}
