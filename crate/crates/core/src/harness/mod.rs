//! Solver dispatch, run reports and report re-verification.

pub mod bench;
pub mod calibrate;
pub mod generate;

pub use bench::{run_suite, to_csv, BenchRow, Cell, Suite};
pub use calibrate::{calibrate, CalibrationReport};
pub use generate::{generate, GenParams, Kind};

use crate::deadline::{bicriteria_round, solve_deadline_bicriteria, solve_deadline_dbl, solve_deadline_tw, verify_walk, DeadlineOptions};
use crate::doubling::{solve_kstroll_dbl, solve_p2p_dbl, SolverConfig};
use crate::error::SolveError;
use crate::instance::{Instance, Num};
use crate::metric::MetricInstance;
use crate::oracle;
use crate::path::Walk;
use crate::rational::{to_f64, Q};
use crate::treewidth::{solve_kstroll_tw, solve_p2p_tw};
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Kstroll,
    P2p,
    Deadline,
    ExactKstroll,
    ExactP2p,
    ExactDeadline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Doubling,
    Treewidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DeadlineMode {
    ExactDeadlines,
    Bicriteria,
}

/// Everything a solve needs besides the instance; echoed into the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    pub command: Command,
    pub backend: Backend,
    pub mode: DeadlineMode,
    #[serde(serialize_with = "crate::rational::serialize_q", deserialize_with = "crate::rational::deserialize_q")]
    pub epsilon: Q,
    pub gamma: Option<usize>,
    pub m_max: usize,
    pub max_guesses: usize,
    pub kappa_prime: Option<u32>,
    pub crossing_cap: Option<usize>,
    pub seed: u64,
    /// compare against the exact oracle
    pub oracle: bool,
    /// deadline: solve only the skeleton of this walk (node ids)
    pub oracle_guess: Option<Vec<String>>,
    /// deadline: skeleton from the exact oracle's walk
    pub oracle_guess_exact: bool,
    /// deadline: small groups of a known walk stay fixed
    pub exact_small_groups: bool,
    /// deadline: the start does not count
    pub exclude_start: bool,
    /// p2p: endpoints do not count
    pub exclude_endpoints: bool,
    pub k: Option<usize>,
    pub budget: Option<String>,
    /// record wall time in the report
    pub timing: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions::new(Command::Kstroll)
    }
}

impl SolveOptions {
    pub fn new(command: Command) -> Self {
        SolveOptions {
            command,
            backend: Backend::Doubling,
            mode: DeadlineMode::ExactDeadlines,
            epsilon: Q::new(1, 2),
            gamma: None,
            m_max: 4,
            max_guesses: SolverConfig::default().max_guesses,
            kappa_prime: None,
            crossing_cap: None,
            seed: 0,
            oracle: false,
            oracle_guess: None,
            oracle_guess_exact: false,
            exact_small_groups: false,
            exclude_start: false,
            exclude_endpoints: false,
            k: None,
            budget: None,
            timing: true,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            eps: self.epsilon,
            gamma: if self.command == Command::Deadline { None } else { self.gamma },
            gamma_deadline: self.gamma.unwrap_or(SolverConfig::default().gamma_deadline),
            kappa_prime: self.kappa_prime,
            crossing_cap: self.crossing_cap,
            m_max: self.m_max,
            max_guesses: self.max_guesses,
            seed: self.seed,
            ..SolverConfig::default()
        }
    }

    fn solver_name(&self) -> String {
        let cmd = serde_json::to_value(self.command).expect("command");
        let cmd = cmd.as_str().expect("str");
        match self.command {
            Command::ExactKstroll | Command::ExactP2p | Command::ExactDeadline => format!("{cmd}/oracle"),
            _ => {
                let b = if self.backend == Backend::Doubling { "doubling" } else { "treewidth" };
                let mode = if self.command == Command::Deadline && self.mode == DeadlineMode::Bicriteria { "/bicriteria" } else { "" };
                format!("{cmd}/{b}{mode}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalRow {
    pub node: String,
    pub arrival: Num,
    pub deadline: Option<Num>,
    pub on_time: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub walk: Vec<String>,
    /// walk length in input units
    pub length: Num,
    /// length for k-stroll, prize for p2p, on-time count for deadline
    pub value: Num,
    pub certified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrivals: Option<Vec<ArrivalRow>>,
    /// largest arrival/deadline factor under true distances (bicriteria)
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub solver: String,
    pub config: serde_json::Value,
    pub result: RunResult,
    pub oracle: Option<Num>,
    pub ratio: Option<f64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn value(&self) -> Q {
        self.result.value.0
    }
}

fn labels(m: &MetricInstance, w: &[usize]) -> Vec<String> {
    w.iter().map(|&v| m.label(v).to_string()).collect()
}

fn node_index(m: &MetricInstance, id: &str) -> Result<usize, SolveError> {
    m.index_of(id).ok_or_else(|| crate::error::MetricError::UnknownNode(id.to_string()).into())
}

fn k_of(inst: &Instance, opts: &SolveOptions) -> Result<usize, SolveError> {
    opts.k.or(inst.k).ok_or(SolveError::Missing("k"))
}

fn budget_of(inst: &Instance, opts: &SolveOptions) -> Result<i64, SolveError> {
    match &opts.budget {
        Some(text) => {
            let q = crate::rational::parse_rational(text).ok_or_else(|| SolveError::Config(format!("bad budget {text:?}")))?;
            Ok(inst.metric.raw_floor_ticks(&q))
        }
        None => inst.budget_ticks(),
    }
}

fn deadline_rows(m: &MetricInstance, raw: &[Option<Q>], walk: &[usize], on_time: &[usize]) -> Vec<ArrivalRow> {
    oracle::first_arrivals(m, walk)
        .into_iter()
        .map(|(v, t)| ArrivalRow {
            node: m.label(v).to_string(),
            arrival: Num(m.raw(t)),
            deadline: raw[v].map(Num),
            on_time: on_time.contains(&v),
            violation: None,
        })
        .collect()
}

fn ratio(value: Q, opt: Q) -> f64 {
    if opt == Q::from_integer(0) {
        if value == opt { 1.0 } else { f64::INFINITY }
    } else {
        to_f64(&(value / opt))
    }
}

/// Runs one command on one instance.
pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<RunReport, SolveError> {
    let started = Instant::now();
    let m = &inst.metric;
    let s = m.start;
    let t = inst.end_or_start();
    let cfg = opts.solver_config();
    let raw_deadlines = || inst.deadlines.clone().ok_or(SolveError::Missing("deadlines"));
    let (walk, value, certified, mut arrivals, mut violation, details, oracle_value): (Walk, Q, bool, _, _, serde_json::Value, Option<Q>);
    arrivals = None;
    violation = None;
    match opts.command {
        Command::Kstroll | Command::ExactKstroll => {
            let k = k_of(inst, opts)?;
            if opts.command == Command::ExactKstroll {
                let r = oracle::exact_kstroll(m, s, t, k)?;
                (walk, certified, details) = (r.witness, true, serde_json::json!({"explored": r.explored}));
            } else if opts.backend == Backend::Treewidth {
                let r = solve_kstroll_tw(m, inst.decomposition.as_ref(), s, t, k)?;
                (walk, certified, details) = (r.walk().clone(), true, serde_json::json!({"width": r.width, "states": r.states_explored}));
            } else {
                let r = solve_kstroll_dbl(m, s, t, k, &cfg)?;
                (walk, certified, details) = (r.walk.clone(), r.certified, serde_json::json!({"tree": r.tree_stats, "exhaustive": r.exhaustive}));
            }
            value = m.raw(walk.length());
            oracle_value = if opts.oracle { Some(m.raw(oracle::exact_kstroll(m, s, t, k)?.value)) } else { None };
        }
        Command::P2p | Command::ExactP2p => {
            let b = budget_of(inst, opts)?;
            let ex = opts.exclude_endpoints;
            let prize;
            if opts.command == Command::ExactP2p {
                let r = oracle::exact_p2p(m, s, t, b, ex)?;
                (walk, prize, certified, details) = (r.witness, r.value as usize, true, serde_json::json!({"explored": r.explored}));
            } else if opts.backend == Backend::Treewidth {
                let r = solve_p2p_tw(m, inst.decomposition.as_ref(), s, t, b, ex)?;
                (walk, prize, certified, details) = (r.walk().clone(), r.prize, true, serde_json::json!({"width": r.width, "states": r.states_explored}));
            } else {
                let r = solve_p2p_dbl(m, s, t, b, ex, &cfg)?;
                (walk, prize, certified, details) =
                    (r.walk.clone(), r.prize, r.certified, serde_json::json!({"tree": r.tree_stats, "exhaustive": r.exhaustive}));
            }
            value = Q::from_integer(prize as i64);
            oracle_value = if opts.oracle { Some(Q::from_integer(oracle::exact_p2p(m, s, t, b, ex)?.value)) } else { None };
        }
        Command::Deadline | Command::ExactDeadline => {
            let raw = raw_deadlines()?;
            let known = opts.oracle_guess.as_ref().map(|ids| ids.iter().map(|id| node_index(m, id)).collect::<Result<Vec<_>, _>>()).transpose()?;
            let dopts = DeadlineOptions {
                known_path: known,
                oracle_guess: opts.oracle_guess_exact,
                exact_small_groups: opts.exact_small_groups,
                exclude_start: opts.exclude_start,
                allow_rational: false,
                keep_candidates: false,
            };
            let start_penalty = |m: &MetricInstance| i64::from(opts.exclude_start && m.deadline(s) >= 0);
            if opts.command == Command::ExactDeadline {
                let r = oracle::exact_deadline(m, s)?;
                let v = verify_walk(m, r.witness.vertices(), opts.exclude_start);
                arrivals = Some(deadline_rows(m, &raw, r.witness.vertices(), &v.on_time));
                (walk, certified, details) = (r.witness, true, serde_json::json!({"explored": r.explored}));
                value = Q::from_integer(v.count() as i64);
                oracle_value = if opts.oracle { Some(Q::from_integer(r.value - start_penalty(m))) } else { None };
            } else if opts.mode == DeadlineMode::Bicriteria {
                if opts.backend == Backend::Treewidth {
                    return Err(SolveError::Config("bicriteria mode runs on the doubling backend".into()));
                }
                let (rounded, b) = solve_deadline_bicriteria(m, &raw, &cfg, &dopts)?;
                let mut rows = deadline_rows(m, &raw, b.solution.walk.vertices(), &b.solution.verified.on_time);
                for (row, (_, f)) in rows.iter_mut().filter(|r| r.on_time).zip(&b.violations) {
                    row.violation = Some(*f);
                }
                arrivals = Some(rows);
                violation = Some(Num(b.violation));
                value = Q::from_integer(b.solution.on_time as i64);
                certified = b.solution.certified;
                details = serde_json::json!({
                    "lambda": crate::rational::format_q(&b.lambda),
                    "groups": b.solution.groups,
                    "enumeration": b.solution.stats,
                    "candidates": b.solution.candidates,
                    "prefix_violations": b.solution.prefix_violations,
                });
                walk = b.solution.walk;
                oracle_value = if opts.oracle {
                    let r = oracle::exact_deadline(&rounded.metric, s)?;
                    Some(Q::from_integer(r.value - start_penalty(&rounded.metric)))
                } else {
                    None
                };
            } else {
                let sol = if opts.backend == Backend::Treewidth {
                    solve_deadline_tw(m, inst.decomposition.as_ref(), &cfg, &dopts)?
                } else {
                    solve_deadline_dbl(m, &cfg, &dopts)?
                };
                arrivals = Some(deadline_rows(m, &raw, sol.walk.vertices(), &sol.verified.on_time));
                value = Q::from_integer(sol.on_time as i64);
                certified = sol.certified;
                details = serde_json::json!({
                    "groups": sol.groups,
                    "credited": sol.credited,
                    "enumeration": sol.stats,
                    "candidates": sol.candidates,
                    "prefix_violations": sol.prefix_violations,
                });
                walk = sol.walk;
                oracle_value = if opts.oracle {
                    let r = oracle::exact_deadline(m, s)?;
                    Some(Q::from_integer(r.value - start_penalty(m)))
                } else {
                    None
                };
            }
        }
    }
    let config = serde_json::to_value(opts).expect("options serialize");
    Ok(RunReport {
        instance: inst.id(),
        solver: opts.solver_name(),
        config,
        result: RunResult {
            walk: labels(m, walk.vertices()),
            length: Num(m.raw(m.seq_len(walk.vertices()))),
            value: Num(value),
            certified,
            arrivals,
            violation,
            details: Some(details),
        },
        ratio: oracle_value.map(|o| ratio(value, o)),
        oracle: oracle_value.map(Num),
        seed: opts.seed,
        wall_ms: opts.timing.then(|| started.elapsed().as_secs_f64() * 1000.0),
    })
}

/// Outcome of re-simulating a report against its instance.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub ok: bool,
    pub failures: Vec<String>,
}

/// Recomputes length, prize and deadlines of a report's walk from scratch.
pub fn verify_report(inst: &Instance, report: &RunReport) -> Result<VerifyOutcome, SolveError> {
    let opts: SolveOptions = serde_json::from_value(report.config.clone()).map_err(|e| SolveError::Config(format!("config echo: {e}")))?;
    let m = &inst.metric;
    let walk = report.result.walk.iter().map(|id| node_index(m, id)).collect::<Result<Vec<_>, _>>()?;
    let mut failures = Vec::new();
    let mut fail = |cond: bool, msg: String| {
        if !cond {
            failures.push(msg);
        }
    };
    fail(walk.first() == Some(&m.start), "walk does not begin at the start".into());
    let length = m.raw(m.seq_len(&walk));
    fail(length == report.result.length.0, format!("length {} != reported {}", length, report.result.length.0));
    let distinct = {
        let mut w = walk.clone();
        w.sort_unstable();
        w.dedup();
        w.len()
    };
    let value = report.result.value.0;
    match opts.command {
        Command::Kstroll | Command::ExactKstroll => {
            let k = k_of(inst, &opts)?;
            fail(walk.last() == Some(&inst.end_or_start()), "walk does not end at the end node".into());
            fail(distinct >= k, format!("{distinct} distinct vertices < k = {k}"));
            fail(value == length, "value differs from length".into());
        }
        Command::P2p | Command::ExactP2p => {
            let b = budget_of(inst, &opts)?;
            let t = inst.end_or_start();
            fail(walk.last() == Some(&t), "walk does not end at the end node".into());
            fail(m.seq_len(&walk) <= b, "walk exceeds the budget".into());
            let ends = if opts.exclude_endpoints { if m.start == t { 1 } else { 2 } } else { 0 };
            fail(Q::from_integer((distinct - ends) as i64) == value, format!("prize {} != reported {value}", distinct - ends));
        }
        Command::Deadline | Command::ExactDeadline => {
            let on_time = if opts.command == Command::Deadline && opts.mode == DeadlineMode::Bicriteria {
                let raw = inst.deadlines.clone().ok_or(SolveError::Missing("deadlines"))?;
                let rounded = bicriteria_round(m, &raw, &opts.epsilon)?;
                verify_walk(&rounded.metric, &walk, opts.exclude_start).count()
            } else {
                verify_walk(m, &walk, opts.exclude_start).count()
            };
            fail(Q::from_integer(on_time as i64) == value, format!("on-time count {on_time} != reported {value}"));
        }
    }
    Ok(VerifyOutcome { ok: failures.is_empty(), failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(kind: Kind, p: GenParams, seed: u64) -> Instance {
        generate(kind, &p, seed).unwrap().parse().unwrap()
    }

    #[test]
    fn kstroll_with_k2_is_the_direct_edge() {
        let i = inst(Kind::Euclidean, GenParams { n: 6, with_end: true, ..GenParams::default() }, 4);
        let mut o = SolveOptions::new(Command::Kstroll);
        o.k = Some(2);
        let r = solve(&i, &o).unwrap();
        let (s, t) = (i.metric.start, i.end_or_start());
        assert_eq!(r.result.length.0, i.metric.raw(i.metric.d(s, t)));
        assert!(verify_report(&i, &r).unwrap().ok);
    }

    #[test]
    fn p2p_below_geodesic_is_infeasible() {
        let i = inst(Kind::Euclidean, GenParams { n: 5, with_end: true, ..GenParams::default() }, 1);
        let mut o = SolveOptions::new(Command::P2p);
        o.budget = Some("0".into());
        assert!(solve(&i, &o).unwrap_err().is_infeasible());
    }

    #[test]
    fn deadline_report_carries_arrivals_and_ratio() {
        let i = inst(Kind::Bounded, GenParams { n: 8, deadlines: true, ..GenParams::default() }, 2);
        let mut o = SolveOptions::new(Command::Deadline);
        o.oracle = true;
        o.m_max = 3;
        o.timing = false;
        let r = solve(&i, &o).unwrap();
        let ratio = r.ratio.unwrap();
        assert!((0.5..=1.0).contains(&ratio), "ratio {ratio}");
        assert!(r.result.arrivals.as_ref().unwrap().iter().all(|a| !a.on_time || a.deadline.is_none_or(|d| a.arrival <= d)));
        assert!(verify_report(&i, &r).unwrap().ok);
        assert_eq!(r.to_json(), solve(&i, &o).unwrap().to_json());
    }

    #[test]
    fn tampered_reports_fail_verification() {
        let i = inst(Kind::Bounded, GenParams { n: 6, deadlines: true, ..GenParams::default() }, 5);
        let r = solve(&i, &SolveOptions::new(Command::ExactDeadline)).unwrap();
        let mut bad = r.clone();
        bad.result.value = Num(r.result.value.0 + 1);
        assert!(verify_report(&i, &r).unwrap().ok);
        assert!(!verify_report(&i, &bad).unwrap().ok);
    }
}
