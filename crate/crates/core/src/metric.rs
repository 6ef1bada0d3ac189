//! Finite metric spaces with exact distances.
//!
//! Distances are stored as integer ticks. One tick is a fixed rational
//! fraction of the minimum pairwise distance, so every comparison and sum in
//! the solvers is exact integer arithmetic. Euclidean inputs are snapped up to
//! a `1/grid` lattice at ingestion, which preserves the triangle inequality.

use crate::error::MetricError;
use crate::rational::{ceil_q, ceil_sqrt_scaled, floor_q, Q};
use num_integer::Integer;
use rand::Rng;
use std::collections::BTreeMap;

/// Sentinel for "no deadline" and unreachable lengths.
pub const INF: i64 = i64::MAX / 8;

/// Raw distance data before normalization.
#[derive(Debug, Clone)]
pub enum RawMetric {
    Matrix(Vec<Vec<Q>>),
    Coords(Vec<Vec<Q>>),
    Graph { n: usize, edges: Vec<(usize, usize, Q)> },
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// `None` checks the triangle inequality only when n <= 64.
    pub triangle_check: Option<bool>,
    /// Lattice resolution for Euclidean distances.
    pub grid: i64,
    pub labels: Option<Vec<String>>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { triangle_check: None, grid: 1000, labels: None }
    }
}

#[derive(Debug, Clone)]
pub struct MetricInstance {
    labels: Vec<String>,
    dist: Vec<i64>,
    n: usize,
    /// raw length -> ticks
    to_ticks: Q,
    /// ticks -> normalized length
    unit: Q,
    diameter: i64,
    coords: Option<Vec<Vec<Q>>>,
    /// graph edges in ticks when built from a weighted graph
    edges: Option<Vec<(usize, usize, i64)>>,
    raw_integral: bool,
    pub start: usize,
    pub end: Option<usize>,
    deadlines: Option<Vec<i64>>,
    deadlines_integral: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetResult {
    pub centers: Vec<usize>,
    /// covering radius in ticks, as an exact rational
    pub radius_ticks: Q,
    /// node -> covering center, over the target subset
    pub assignment: BTreeMap<usize, usize>,
}

fn lcm_i128(a: i128, b: i128) -> i128 {
    a / a.gcd(&b) * b
}

impl MetricInstance {
    pub fn build(raw: RawMetric, opts: &BuildOptions) -> Result<Self, MetricError> {
        let (n, ints, den, edges, coords) = match raw {
            RawMetric::Matrix(rows) => {
                let n = rows.len();
                if n == 0 {
                    return Err(MetricError::Empty);
                }
                for (i, r) in rows.iter().enumerate() {
                    if r.len() != n {
                        return Err(MetricError::NotSquare { row: i, len: r.len(), n });
                    }
                }
                let mut den: i128 = 1;
                for r in &rows {
                    for x in r {
                        den = lcm_i128(den, *x.denom() as i128);
                        if den > 1 << 62 {
                            return Err(MetricError::Overflow("denominators"));
                        }
                    }
                }
                let ints: Vec<i128> = rows
                    .iter()
                    .flat_map(|r| r.iter().map(|x| *x.numer() as i128 * (den / *x.denom() as i128)))
                    .collect();
                (n, ints, den, None, None)
            }
            RawMetric::Coords(points) => {
                let n = points.len();
                if n == 0 {
                    return Err(MetricError::Empty);
                }
                let dim = points[0].len();
                let mut cden: i128 = 1;
                for (i, p) in points.iter().enumerate() {
                    if p.len() != dim {
                        return Err(MetricError::Dimension(i));
                    }
                    for x in p {
                        cden = lcm_i128(cden, *x.denom() as i128);
                    }
                }
                let scaled: Vec<Vec<i128>> = points
                    .iter()
                    .map(|p| p.iter().map(|x| *x.numer() as i128 * (cden / *x.denom() as i128)).collect())
                    .collect();
                let grid = opts.grid.max(1) as i128;
                let mut ints = vec![0i128; n * n];
                for i in 0..n {
                    for j in (i + 1)..n {
                        let ss: i128 = scaled[i].iter().zip(&scaled[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                        let c = ceil_sqrt_scaled(ss, cden * cden, grid);
                        ints[i * n + j] = c;
                        ints[j * n + i] = c;
                    }
                }
                (n, ints, grid, None, Some(points))
            }
            RawMetric::Graph { n, edges } => {
                if n == 0 {
                    return Err(MetricError::Empty);
                }
                let mut den: i128 = 1;
                for (u, v, w) in &edges {
                    if *u >= n || *v >= n {
                        return Err(MetricError::Invalid(format!("edge ({u},{v}) outside 0..{n}")));
                    }
                    den = lcm_i128(den, *w.denom() as i128);
                }
                let big = i128::MAX / 8;
                let mut d = vec![big; n * n];
                for i in 0..n {
                    d[i * n + i] = 0;
                }
                let mut int_edges = Vec::with_capacity(edges.len());
                for (u, v, w) in &edges {
                    let wi = *w.numer() as i128 * (den / *w.denom() as i128);
                    if wi <= 0 || u == v {
                        return Err(MetricError::NonPositive(u.to_string(), v.to_string()));
                    }
                    int_edges.push((*u, *v, wi));
                    let (a, b) = (u * n + v, v * n + u);
                    if wi < d[a] {
                        d[a] = wi;
                        d[b] = wi;
                    }
                }
                for k in 0..n {
                    for i in 0..n {
                        let dik = d[i * n + k];
                        if dik >= big {
                            continue;
                        }
                        for j in 0..n {
                            let cand = dik + d[k * n + j];
                            if cand < d[i * n + j] {
                                d[i * n + j] = cand;
                            }
                        }
                    }
                }
                let names = label_list(n, &opts.labels);
                for j in 1..n {
                    if d[j] >= big {
                        return Err(MetricError::Disconnected(names[0].clone(), names[j].clone()));
                    }
                }
                (n, d, den, Some(int_edges), None)
            }
        };
        let labels = label_list(n, &opts.labels);
        // validation on raw integers
        for i in 0..n {
            if ints[i * n + i] != 0 {
                return Err(MetricError::NonzeroDiagonal(i));
            }
            for j in (i + 1)..n {
                let (a, b) = (ints[i * n + j], ints[j * n + i]);
                if a != b {
                    return Err(MetricError::Asymmetric(labels[i].clone(), labels[j].clone()));
                }
                if a <= 0 {
                    return Err(MetricError::NonPositive(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        let check = opts.triangle_check.unwrap_or(n <= 64);
        if check && edges.is_none() {
            for a in 0..n {
                for b in 0..n {
                    let ab = ints[a * n + b];
                    for c in 0..n {
                        if ints[a * n + c] > ab + ints[b * n + c] {
                            return Err(MetricError::Triangle {
                                a: labels[a].clone(),
                                b: labels[b].clone(),
                                c: labels[c].clone(),
                            });
                        }
                    }
                }
            }
        }
        let mut g: i128 = 0;
        let mut min_pos: i128 = 0;
        for &x in &ints {
            if x > 0 {
                g = g.gcd(&x);
                if min_pos == 0 || x < min_pos {
                    min_pos = x;
                }
            }
        }
        if let Some(es) = &edges {
            for (_, _, w) in es {
                g = g.gcd(w);
            }
        }
        if n == 1 {
            g = 1;
            min_pos = 1;
        }
        let dist: Vec<i64> = ints
            .iter()
            .map(|&x| i64::try_from(x / g).map_err(|_| MetricError::Overflow("distances")))
            .collect::<Result<_, _>>()?;
        if dist.iter().any(|&x| x > INF / 1024) {
            return Err(MetricError::Overflow("distances"));
        }
        let to_ticks = Q::new(
            i64::try_from(den / den.gcd(&g)).map_err(|_| MetricError::Overflow("scale"))?,
            i64::try_from(g / den.gcd(&g)).map_err(|_| MetricError::Overflow("scale"))?,
        );
        let unit = Q::new(
            i64::try_from(g).map_err(|_| MetricError::Overflow("unit"))?,
            i64::try_from(min_pos).map_err(|_| MetricError::Overflow("unit"))?,
        );
        let diameter = dist.iter().copied().max().unwrap_or(0);
        let edges = edges.map(|es| es.into_iter().map(|(u, v, w)| (u, v, (w / g) as i64)).collect());
        Ok(MetricInstance {
            labels,
            dist,
            n,
            to_ticks,
            unit,
            diameter,
            coords,
            edges,
            raw_integral: den == 1,
            start: 0,
            end: None,
            deadlines: None,
            deadlines_integral: true,
        })
    }

    /// Builds from an integer matrix, the common case in tests.
    pub fn from_int_matrix(rows: &[Vec<i64>]) -> Result<Self, MetricError> {
        let rows = rows.iter().map(|r| r.iter().map(|&x| Q::from_integer(x)).collect()).collect();
        Self::build(RawMetric::Matrix(rows), &BuildOptions::default())
    }

    pub fn from_points(points: &[Vec<i64>]) -> Result<Self, MetricError> {
        let pts = points.iter().map(|p| p.iter().map(|&x| Q::from_integer(x)).collect()).collect();
        Self::build(RawMetric::Coords(pts), &BuildOptions::default())
    }

    /// Every pair at distance one.
    pub fn uniform(n: usize) -> Self {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i != j)).collect()).collect();
        Self::from_int_matrix(&rows).expect("uniform metric is valid")
    }

    pub fn with_start(mut self, start: usize) -> Self {
        self.start = start;
        self
    }

    pub fn with_end(mut self, end: Option<usize>) -> Self {
        self.end = end;
        self
    }

    /// Attaches raw deadlines (`None` means no deadline).
    pub fn with_deadlines(mut self, deadlines: &[Option<Q>]) -> Self {
        self.deadlines_integral = deadlines.iter().flatten().all(|d| d.is_integer());
        let ticks = deadlines
            .iter()
            .map(|d| match d {
                Some(q) => self.raw_floor_ticks(q),
                None => INF,
            })
            .collect();
        self.deadlines = Some(ticks);
        self
    }

    /// Attaches deadlines already expressed in ticks.
    pub fn with_tick_deadlines(mut self, ticks: Vec<i64>, integral: bool) -> Self {
        self.deadlines_integral = integral;
        self.deadlines = Some(ticks);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Distance in ticks.
    #[inline]
    pub fn d(&self, u: usize, v: usize) -> i64 {
        self.dist[u * self.n + v]
    }

    /// Normalized distance (minimum pairwise distance is one).
    pub fn distance(&self, u: usize, v: usize) -> Q {
        self.unit * self.d(u, v)
    }

    pub fn unit(&self) -> Q {
        self.unit
    }

    /// Ticks to normalized length.
    pub fn normalized(&self, ticks: i64) -> Q {
        self.unit * ticks
    }

    /// Ticks back to the input's units.
    pub fn raw(&self, ticks: i64) -> Q {
        Q::from_integer(ticks) / self.to_ticks
    }

    /// Raw length to ticks, rounded down (exact for comparisons `len <= x`).
    pub fn raw_floor_ticks(&self, x: &Q) -> i64 {
        floor_q(&(*x * self.to_ticks))
    }

    pub fn raw_ceil_ticks(&self, x: &Q) -> i64 {
        ceil_q(&(*x * self.to_ticks))
    }

    /// Normalized length to ticks, rounded down.
    pub fn normalized_floor_ticks(&self, x: &Q) -> i64 {
        floor_q(&(*x / self.unit))
    }

    pub fn diameter_ticks(&self) -> i64 {
        self.diameter
    }

    /// Aspect ratio Δ (normalized diameter).
    pub fn aspect_ratio(&self) -> Q {
        self.normalized(self.diameter)
    }

    /// δ = log₂ Δ, for parameter formulas only.
    pub fn log_aspect(&self) -> f64 {
        crate::rational::to_f64(&self.aspect_ratio()).max(1.0).log2()
    }

    pub fn coords(&self) -> Option<&[Vec<Q>]> {
        self.coords.as_deref()
    }

    pub fn graph_edges(&self) -> Option<&[(usize, usize, i64)]> {
        self.edges.as_deref()
    }

    /// Raw distances and deadlines are all integers.
    pub fn is_integral(&self) -> bool {
        self.raw_integral && self.deadlines_integral
    }

    pub fn deadlines(&self) -> Option<&[i64]> {
        self.deadlines.as_deref()
    }

    pub fn deadline(&self, v: usize) -> i64 {
        self.deadlines.as_ref().map_or(INF, |d| d[v])
    }

    /// Length of a vertex sequence in ticks.
    pub fn seq_len(&self, seq: &[usize]) -> i64 {
        seq.windows(2).map(|w| self.d(w[0], w[1])).sum()
    }

    pub fn ball(&self, v: usize, r: &Q) -> Vec<usize> {
        let lim = self.normalized_floor_ticks(r);
        (0..self.n).filter(|&u| self.d(u, v) <= lim).collect()
    }

    pub fn diameter(&self, subset: &[usize]) -> Result<Q, MetricError> {
        if subset.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        Ok(self.normalized(self.subset_diameter_ticks(subset)))
    }

    pub fn subset_diameter_ticks(&self, subset: &[usize]) -> i64 {
        let mut best = 0;
        for (i, &u) in subset.iter().enumerate() {
            for &v in &subset[i + 1..] {
                best = best.max(self.d(u, v));
            }
        }
        best
    }

    /// Random greedy ρ-net of `subset`; ρ is a normalized length.
    pub fn greedy_net<R: Rng + ?Sized>(&self, subset: &[usize], rho: &Q, rng: &mut R) -> NetResult {
        self.greedy_net_ticks(subset, *rho / self.unit, rng)
    }

    /// Random greedy net with radius given in ticks.
    pub fn greedy_net_ticks<R: Rng + ?Sized>(&self, subset: &[usize], radius: Q, rng: &mut R) -> NetResult {
        let within = |a: usize, b: usize| Q::from_integer(self.d(a, b)) <= radius;
        let mut uncovered: Vec<usize> = subset.to_vec();
        uncovered.sort_unstable();
        uncovered.dedup();
        let mut centers = Vec::new();
        while !uncovered.is_empty() {
            let c = uncovered[rng.gen_range(0..uncovered.len())];
            centers.push(c);
            uncovered.retain(|&u| !within(c, u));
        }
        let assignment = self.assign_to_centers(subset, &centers, radius);
        NetResult { centers, radius_ticks: radius, assignment }
    }

    /// Each node goes to a covering center: nearest first, then smallest id.
    pub fn assign_to_centers(&self, subset: &[usize], centers: &[usize], radius: Q) -> BTreeMap<usize, usize> {
        subset
            .iter()
            .map(|&u| {
                let c = centers
                    .iter()
                    .copied()
                    .filter(|&c| Q::from_integer(self.d(c, u)) <= radius)
                    .min_by_key(|&c| (self.d(c, u), c))
                    .expect("net covers every node");
                (u, c)
            })
            .collect()
    }

    /// Heuristic upper estimate of the doubling dimension: for every center
    /// and dyadic radius, greedily cover the double ball with half balls and
    /// take ⌈log₂⌉ of the worst count.
    pub fn doubling_dimension_estimate(&self) -> Q {
        if self.n <= 1 {
            return Q::from_integer(0);
        }
        let mut worst = 1usize;
        // radii r = 2^j / 2 in ticks-as-rational, from below the min distance to the diameter
        let min_tick = (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| self.d(i, j))
            .min()
            .unwrap_or(1);
        let mut r = Q::new(min_tick, 4);
        let top = Q::from_integer(self.diameter.max(1));
        while r <= top {
            for v in 0..self.n {
                let big: Vec<usize> = (0..self.n).filter(|&u| Q::from_integer(self.d(u, v)) <= r * 2).collect();
                let mut left = big.clone();
                let mut count = 0;
                while let Some(&c) = left.iter().min_by_key(|&&u| (std::cmp::Reverse(self.cover_gain(u, &left, r)), u)) {
                    count += 1;
                    left.retain(|&u| Q::from_integer(self.d(c, u)) > r);
                }
                worst = worst.max(count);
            }
            r *= 2;
        }
        let mut bits = 0i64;
        while (1usize << bits) < worst {
            bits += 1;
        }
        Q::from_integer(bits)
    }

    fn cover_gain(&self, c: usize, left: &[usize], r: Q) -> usize {
        left.iter().filter(|&&u| Q::from_integer(self.d(c, u)) <= r).count()
    }
}

fn label_list(n: usize, labels: &Option<Vec<String>>) -> Vec<String> {
    match labels {
        Some(l) if l.len() == n => l.clone(),
        _ => (0..n).map(|i| i.to_string()).collect(),
    }
}

/// Checks the net invariants exhaustively: cover within ρ and pairwise > ρ.
pub fn net_is_valid(m: &MetricInstance, subset: &[usize], net: &NetResult) -> bool {
    let r = net.radius_ticks;
    let cover = subset
        .iter()
        .all(|&u| net.centers.iter().any(|&c| Q::from_integer(m.d(c, u)) <= r));
    let packing = net
        .centers
        .iter()
        .enumerate()
        .all(|(i, &a)| net.centers[i + 1..].iter().all(|&b| Q::from_integer(m.d(a, b)) > r));
    let assigned = subset
        .iter()
        .all(|u| net.assignment.get(u).is_some_and(|&c| Q::from_integer(m.d(c, *u)) <= r));
    cover && packing && assigned
}
