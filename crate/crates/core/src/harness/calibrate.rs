//! Monte-Carlo fit of the pair separation constant of random partitions.

use crate::decomposition::{mix64, random_partition, Cluster};
use crate::error::SolveError;
use crate::metric::MetricInstance;
use crate::rational::to_f64;
use serde::Serialize;

pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct PairFrequency {
    pub u: usize,
    pub v: usize,
    /// d(u, v) / Δ_C
    pub relative_distance: f64,
    pub frequency: f64,
    /// frequency plus three binomial standard deviations
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub trials: usize,
    pub seed: u64,
    /// max over pairs of frequency · Δ_C / d(u, v)
    pub kappa_fit: f64,
    /// same with the 3σ upper frequencies
    pub kappa_upper: f64,
    /// suggested κ' for later runs, ⌈kappa_upper⌉
    pub kappa_prime: u32,
    pub pairs: Vec<PairFrequency>,
}

impl CalibrationReport {
    /// Fitted separation bound for a pair at relative distance `r`.
    pub fn bound(&self, r: f64) -> f64 {
        (self.kappa_fit * r).min(1.0)
    }
}

/// Per-pair frequency of falling into different parts of the root cluster.
pub fn separation_frequencies(m: &MetricInstance, trials: usize, seed: u64) -> Result<Vec<Vec<usize>>, SolveError> {
    let n = m.n();
    let root = Cluster { id: 0, vertices: (0..n).collect(), level: 0, diameter: m.diameter_ticks() };
    let mut cut = vec![vec![0usize; n]; n];
    for t in 0..trials {
        let split = random_partition(m, &root, mix64(seed ^ mix64(t as u64)))?;
        #[allow(clippy::needless_range_loop)]
        for u in 0..n {
            for v in u + 1..n {
                if split.part_of(u) != split.part_of(v) {
                    cut[u][v] += 1;
                }
            }
        }
    }
    Ok(cut)
}

pub fn calibrate(m: &MetricInstance, trials: usize, seed: u64) -> Result<CalibrationReport, SolveError> {
    if trials < MIN_TRIALS {
        return Err(SolveError::Config(format!("calibration needs at least {MIN_TRIALS} trials")));
    }
    let n = m.n();
    let cut = separation_frequencies(m, trials, seed)?;
    let diam = to_f64(&m.normalized(m.diameter_ticks()));
    let mut pairs = Vec::new();
    let (mut fit, mut upper) = (0.0f64, 0.0f64);
    #[allow(clippy::needless_range_loop)]
    for u in 0..n {
        for v in u + 1..n {
            let r = to_f64(&m.distance(u, v)) / diam;
            let f = cut[u][v] as f64 / trials as f64;
            // σ floored at one event so a zero count still gets a margin
            let sigma = (f * (1.0 - f) / trials as f64).sqrt().max(1.0 / trials as f64);
            let hi = (f + 3.0 * sigma).min(1.0);
            fit = fit.max(f / r);
            upper = upper.max(hi / r);
            pairs.push(PairFrequency { u, v, relative_distance: r, frequency: f, upper: hi });
        }
    }
    Ok(CalibrationReport { trials, seed, kappa_fit: fit, kappa_upper: upper, kappa_prime: upper.ceil().max(1.0) as u32, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair_is_always_or_never_cut() {
        let m = MetricInstance::uniform(2);
        let r = calibrate(&m, 100, 3).unwrap();
        assert!(r.pairs[0].frequency == 0.0 || r.pairs[0].frequency == 1.0);
        assert!(r.kappa_fit.is_finite());
    }

    #[test]
    fn fitted_bound_dominates_and_repeats() {
        let pts: Vec<Vec<i64>> = (0..8).map(|i| vec![i]).collect();
        let m = MetricInstance::from_points(&pts).unwrap();
        let a = calibrate(&m, 2000, 9).unwrap();
        for p in &a.pairs {
            assert!(p.frequency <= a.bound(p.relative_distance) + 1e-12);
        }
        let b = calibrate(&m, 2000, 9).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(calibrate(&m, 10, 9).is_err());
    }
}
