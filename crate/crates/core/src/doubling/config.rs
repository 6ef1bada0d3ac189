use crate::decomposition::{log_aspect_ceil, PortalParams};
use crate::error::SolveError;
use crate::metric::MetricInstance;
use crate::rational::{ceil_q, floor_q, Q};
use serde::Serialize;

/// User-facing knobs; `None` fields take their defaults from the instance.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub eps: Q,
    /// jump size; default ⌊1/ε⌋ + 1
    pub mu: Option<usize>,
    /// doubling dimension; default is the metric's estimate
    pub kappa: Option<u32>,
    /// default 2κ + 2
    pub kappa_prime: Option<u32>,
    /// splits per cluster; default 3⌈log₂ n⌉
    pub gamma: Option<usize>,
    pub leaf_size: usize,
    /// crossings allowed per cluster in the sparse regime; default ⌈2κ' log₂ n / ε⌉
    pub sparse_cap: Option<usize>,
    /// practical crossing cap; binding it clears `certified`
    pub crossing_cap: Option<usize>,
    /// most start–end pairs per multi-path query
    pub sigma_cap: usize,
    pub max_n: usize,
    pub seed: u64,
    /// most breakpoint groups in deadline guesses
    pub m_max: usize,
    /// most deadline guesses verified
    pub max_guesses: usize,
    /// splits per cluster in the deadline solver
    pub gamma_deadline: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps: Q::new(1, 2),
            mu: None,
            kappa: None,
            kappa_prime: None,
            gamma: None,
            leaf_size: 3,
            sparse_cap: None,
            crossing_cap: None,
            sigma_cap: 8,
            max_n: 16,
            seed: 0,
            m_max: 4,
            max_guesses: 20_000,
            gamma_deadline: 16,
        }
    }
}

/// Parameters after defaults are filled in for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct Params {
    #[serde(serialize_with = "crate::rational::serialize_q")]
    pub eps: Q,
    pub mu: usize,
    pub kappa: u32,
    pub kappa_prime: u32,
    /// ⌈log₂ Δ⌉
    pub delta: u32,
    pub gamma: usize,
    pub leaf_size: usize,
    pub sparse_cap: usize,
    pub crossing_cap: Option<usize>,
    /// density threshold log₂ n / ε
    pub eta: f64,
    #[serde(serialize_with = "crate::rational::serialize_q")]
    pub beta: Q,
    pub seed: u64,
}

/// `⌊1/ε⌋ + 1`.
pub fn default_mu(eps: &Q) -> usize {
    (floor_q(&eps.recip()) + 1) as usize
}

pub fn log2_ceil(n: usize) -> usize {
    let mut b = 0;
    while (1usize << b) < n {
        b += 1;
    }
    b
}

impl SolverConfig {
    pub fn with_eps(eps: Q) -> Self {
        SolverConfig { eps, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.eps <= Q::from_integer(0) || self.eps >= Q::from_integer(1) {
            return Err(SolveError::Config(format!("epsilon {} outside (0,1)", self.eps)));
        }
        if self.mu.is_some_and(|mu| mu < 2) {
            return Err(SolveError::Config("mu must be at least 2".into()));
        }
        if self.leaf_size == 0 || self.gamma == Some(0) || self.sigma_cap == 0 || self.m_max == 0 {
            return Err(SolveError::Config("caps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn resolve(&self, m: &MetricInstance) -> Result<Params, SolveError> {
        self.validate()?;
        let n = m.n();
        let kappa = self.kappa.unwrap_or_else(|| ceil_q(&m.doubling_dimension_estimate()).max(1) as u32);
        let kappa_prime = self.kappa_prime.unwrap_or(2 * kappa + 2);
        let delta = log_aspect_ceil(m);
        let log_n = (n.max(2) as f64).log2();
        let eps_f = crate::rational::to_f64(&self.eps);
        let sparse_cap = self
            .sparse_cap
            .unwrap_or_else(|| (2.0 * f64::from(kappa_prime) * log_n / eps_f).ceil() as usize)
            .max(1);
        let portal = PortalParams { eps: self.eps, kappa, kappa_prime, delta };
        Ok(Params {
            eps: self.eps,
            mu: self.mu.unwrap_or_else(|| default_mu(&self.eps)),
            kappa,
            kappa_prime,
            delta,
            gamma: self.gamma.unwrap_or(3 * log2_ceil(n).max(1)),
            leaf_size: self.leaf_size,
            sparse_cap,
            crossing_cap: self.crossing_cap,
            eta: log_n / eps_f,
            beta: portal.beta(),
            seed: self.seed,
        })
    }
}

impl Params {
    pub fn portal_params(&self) -> PortalParams {
        PortalParams { eps: self.eps, kappa: self.kappa, kappa_prime: self.kappa_prime, delta: self.delta }
    }

    /// Crossings allowed per cluster in the sparse regime.
    pub fn crossing_limit(&self) -> usize {
        self.crossing_cap.map_or(self.sparse_cap, |c| c.min(self.sparse_cap))
    }

    /// Whether the practical cap is tighter than the theoretical one for clusters of this size.
    pub fn cap_binds(&self, cluster_size: usize) -> bool {
        self.crossing_cap.is_some_and(|c| c < self.sparse_cap && c + 1 < cluster_size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        assert_eq!(default_mu(&Q::new(1, 2)), 3);
        assert_eq!(default_mu(&Q::new(1, 3)), 4);
        assert_eq!(default_mu(&Q::new(2, 5)), 3);
        let m = MetricInstance::uniform(8);
        let p = SolverConfig::default().resolve(&m).unwrap();
        assert_eq!(p.gamma, 9);
        assert_eq!(p.kappa_prime, 2 * p.kappa + 2);
        assert!(SolverConfig::with_eps(Q::from_integer(1)).validate().is_err());
    }
}
