//! Rounding of rational instances to powers of λ = 1 + ε²/δ.
//!
//! Distances round down, deadlines round up, both on the normalized scale.
//! The rounded values are snapped to a 2^-20 grid in the same directions
//! and distances are closed under shortest paths again.

use super::{solve_deadline_dbl, DeadlineOptions, DeadlineSolution};
use crate::decomposition::log_aspect_ceil;
use crate::doubling::SolverConfig;
use crate::error::SolveError;
use crate::metric::{BuildOptions, MetricInstance, RawMetric};
use crate::oracle::first_arrivals;
use crate::rational::Q;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

const GRID_BITS: u32 = 20;

fn big(q: &Q) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

/// Largest power of λ at most `x`, for `x > 0`.
pub fn round_down_pow(x: &BigRational, lambda: &BigRational) -> BigRational {
    let mut p = BigRational::one();
    while &p > x {
        p /= lambda;
    }
    loop {
        let next = &p * lambda;
        if &next > x {
            return p;
        }
        p = next;
    }
}

/// Smallest power of λ at least `x`, for `x > 0`.
pub fn round_up_pow(x: &BigRational, lambda: &BigRational) -> BigRational {
    let mut p = BigRational::one();
    while &p < x {
        p *= lambda;
    }
    loop {
        let next = &p / lambda;
        if &next < x {
            return p;
        }
        p = next;
    }
}

fn snap(x: &BigRational, up: bool) -> i64 {
    let scaled = x * BigRational::from_integer(BigInt::from(1i64 << GRID_BITS));
    let v = if up { scaled.ceil() } else { scaled.floor() };
    v.to_integer().to_i64().expect("grid value fits")
}

#[derive(Debug, Clone)]
pub struct Rounded {
    /// rounded instance, raw units are the original's normalized units
    pub metric: MetricInstance,
    pub lambda: Q,
    /// original raw length to normalized length
    pub scale: Q,
}

/// λ = 1 + ε²/δ with δ = ⌈log₂ Δ⌉ (at least 1).
pub fn lambda(m: &MetricInstance, eps: &Q) -> Q {
    let delta = i64::from(log_aspect_ceil(m).max(1));
    Q::from_integer(1) + *eps * *eps / delta
}

/// `raw_deadlines` are in the input's units, `None` meaning no deadline.
pub fn bicriteria_round(m: &MetricInstance, raw_deadlines: &[Option<Q>], eps: &Q) -> Result<Rounded, SolveError> {
    let n = m.n();
    let lam = lambda(m, eps);
    let lam_big = big(&lam);
    let scale = m.unit() / m.raw(1);
    let mut grid = vec![0i64; n * n];
    for u in 0..n {
        for v in u + 1..n {
            let x = big(&m.distance(u, v));
            let g = snap(&round_down_pow(&x, &lam_big), false).max(1);
            grid[u * n + v] = g;
            grid[v * n + u] = g;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = grid[i * n + k] + grid[k * n + j];
                if via < grid[i * n + j] {
                    grid[i * n + j] = via;
                }
            }
        }
    }
    let den = 1i64 << GRID_BITS;
    let rows = (0..n).map(|i| (0..n).map(|j| Q::new(grid[i * n + j], den)).collect()).collect();
    let opts = BuildOptions { labels: Some(m.labels().to_vec()), ..BuildOptions::default() };
    let base = MetricInstance::build(RawMetric::Matrix(rows), &opts)?;
    let deadlines: Vec<Option<Q>> = raw_deadlines
        .iter()
        .map(|d| {
            d.map(|d| {
                let x = big(&(d * scale));
                if x.is_positive() {
                    Q::new(snap(&round_up_pow(&x, &lam_big), true), den)
                } else if x.is_zero() {
                    Q::from_integer(0)
                } else {
                    d * scale
                }
            })
        })
        .collect();
    let metric = base.with_deadlines(&deadlines).with_start(m.start).with_end(m.end);
    Ok(Rounded { metric, lambda: lam, scale })
}

#[derive(Debug, Clone, Serialize)]
pub struct BicriteriaSolution {
    pub solution: DeadlineSolution,
    #[serde(serialize_with = "crate::rational::serialize_q")]
    pub lambda: Q,
    /// (vertex, first arrival under true distances, raw units)
    pub true_arrivals: Vec<(usize, f64)>,
    /// per on-time vertex, true arrival over true deadline (1 when both are zero)
    pub violations: Vec<(usize, f64)>,
    /// largest per-vertex factor, exact
    #[serde(serialize_with = "crate::rational::serialize_q")]
    pub violation: Q,
}

/// Solves the rounded instance, then re-measures the walk with true distances.
pub fn solve_deadline_bicriteria(
    m: &MetricInstance,
    raw_deadlines: &[Option<Q>],
    cfg: &SolverConfig,
    opts: &DeadlineOptions,
) -> Result<(Rounded, BicriteriaSolution), SolveError> {
    let rounded = bicriteria_round(m, raw_deadlines, &cfg.eps)?;
    let opts = DeadlineOptions { allow_rational: true, ..opts.clone() };
    let solution = solve_deadline_dbl(&rounded.metric, cfg, &opts)?;
    let arrivals: Vec<(usize, Q)> = first_arrivals(m, solution.walk.vertices()).into_iter().map(|(v, t)| (v, m.raw(t))).collect();
    let mut violation = Q::from_integer(1);
    let mut violations = Vec::new();
    for &v in &solution.verified.on_time {
        let a = arrivals.iter().find(|x| x.0 == v).expect("visited").1;
        let f = match raw_deadlines[v] {
            None => Q::from_integer(1),
            Some(d) if d > Q::from_integer(0) => a / d,
            Some(_) if a == Q::from_integer(0) => Q::from_integer(1),
            Some(_) => Q::from_integer(i64::MAX / 4),
        };
        violation = violation.max(f);
        violations.push((v, crate::rational::to_f64(&f)));
    }
    let true_arrivals = arrivals.iter().map(|(v, a)| (*v, crate::rational::to_f64(a))).collect();
    let sol = BicriteriaSolution { solution, lambda: rounded.lambda, true_arrivals, violations, violation };
    Ok((rounded, sol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn powers_are_fixed_points() {
        let lam = r(11, 10);
        let x = &lam * &lam * &lam;
        assert_eq!(round_down_pow(&x, &lam), x);
        assert_eq!(round_up_pow(&x, &lam), x);
    }

    #[test]
    fn rounding_brackets_the_value() {
        let lam = r(11, 10);
        assert_eq!(round_down_pow(&r(105, 100), &lam), r(1, 1));
        assert_eq!(round_up_pow(&r(105, 100), &lam), r(11, 10));
        assert_eq!(round_up_pow(&r(1, 2), &lam), r(1, 1) / (&lam * &lam * &lam * &lam * &lam * &lam * &lam));
    }

    #[test]
    fn rounded_metric_is_shorter_and_deadlines_later() {
        let pts = vec![vec![Q::from_integer(0)], vec![Q::new(7, 3)], vec![Q::new(11, 2)]];
        let m = MetricInstance::build(RawMetric::Coords(pts), &BuildOptions::default()).unwrap();
        let dl = vec![None, Some(Q::new(5, 2)), Some(Q::from_integer(5))];
        let m = m.with_deadlines(&dl);
        let rd = bicriteria_round(&m, &dl, &Q::new(1, 2)).unwrap();
        let rm = &rd.metric;
        for u in 0..3 {
            for v in 0..3 {
                assert!(rm.raw(rm.d(u, v)) <= m.distance(u, v));
                assert!(rm.raw(rm.d(u, v)) * rd.lambda >= m.distance(u, v) * Q::new(999, 1000));
            }
        }
        assert!(rm.deadline(1) < rm.deadline(2));
    }
}
