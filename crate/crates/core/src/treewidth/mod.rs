//! Exact solvers on graphs of bounded treewidth.

pub mod decomp;
pub mod dp;

pub use decomp::{
    binarize, heuristic_tree_decomposition, validate_tree_decomposition, Graph, RootedDecomposition,
    TreeDecomposition,
};
pub use dp::{profile_dp, PathSpec, ProfileTable};

use crate::error::SolveError;
use crate::metric::MetricInstance;
use crate::path::Walk;

#[derive(Debug, Clone)]
pub struct TwSolution {
    pub walks: Vec<Walk>,
    /// total length in ticks
    pub length: i64,
    /// distinct credited vertices
    pub prize: usize,
    pub width: usize,
    pub states_explored: u64,
}

impl TwSolution {
    pub fn walk(&self) -> &Walk {
        &self.walks[0]
    }
}

/// Graph and rooted decomposition for a metric, built heuristically when none is given.
pub fn prepare(m: &MetricInstance, td: Option<&TreeDecomposition>) -> Result<(Graph, RootedDecomposition, usize), SolveError> {
    let g = Graph::from_metric(m);
    let td = match td {
        Some(t) => t.clone(),
        None => heuristic_tree_decomposition(&g),
    };
    let width = td.width();
    let rooted = RootedDecomposition::new(&g, &td)?;
    Ok((g, rooted, width))
}

fn finish(m: &MetricInstance, table: &ProfileTable, count: usize, width: usize) -> TwSolution {
    let walks: Vec<Walk> = table
        .witness(count)
        .expect("count is reachable")
        .into_iter()
        .map(|seq| Walk::new(m, seq))
        .collect();
    TwSolution {
        length: walks.iter().map(Walk::length).sum(),
        walks,
        prize: count,
        width,
        states_explored: table.states_explored,
    }
}

/// Cheapest collection of walks, one per pair, crediting at least `k` distinct vertices.
pub fn solve_multipath_kstroll_tw(
    m: &MetricInstance,
    td: Option<&TreeDecomposition>,
    specs: &[PathSpec],
    k: usize,
) -> Result<TwSolution, SolveError> {
    let (g, rooted, width) = prepare(m, td)?;
    let table = profile_dp(&g, &rooted, specs, k)?;
    let (count, _) = table
        .min_length_at_least(k)
        .ok_or_else(|| SolveError::Infeasible(format!("no walks credit {k} vertices")))?;
    Ok(finish(m, &table, count, width))
}

/// Shortest s–t walk visiting at least `k` distinct vertices.
pub fn solve_kstroll_tw(
    m: &MetricInstance,
    td: Option<&TreeDecomposition>,
    s: usize,
    t: usize,
    k: usize,
) -> Result<TwSolution, SolveError> {
    if k > m.n() {
        return Err(SolveError::TargetTooLarge { k, n: m.n() });
    }
    solve_multipath_kstroll_tw(m, td, &[PathSpec::all(m.n(), s, t)], k)
}

/// Walk from s to t of length at most `budget` ticks visiting the most vertices.
pub fn solve_p2p_tw(
    m: &MetricInstance,
    td: Option<&TreeDecomposition>,
    s: usize,
    t: usize,
    budget: i64,
    exclude_endpoints: bool,
) -> Result<TwSolution, SolveError> {
    if budget < m.d(s, t) {
        return Err(SolveError::Infeasible(format!("budget below d(s,t) = {}", m.d(s, t))));
    }
    let (g, rooted, width) = prepare(m, td)?;
    let mut spec = PathSpec::all(m.n(), s, t);
    if exclude_endpoints {
        spec.eligible[s] = false;
        spec.eligible[t] = false;
    }
    let table = profile_dp(&g, &rooted, &[spec], m.n())?;
    let count = table.max_count_within(budget).expect("a shortest path fits");
    Ok(finish(m, &table, count, width))
}
