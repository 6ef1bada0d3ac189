//! Random net partitions, portals and the γ-split-tree.

use crate::error::DecompositionError;
use crate::metric::MetricInstance;
use crate::path::Walk;
use crate::rational::{format_q, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, VecDeque};

/// Constants that size portal sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PortalParams {
    pub eps: Q,
    /// doubling dimension used for the bounds
    pub kappa: u32,
    /// multiplier in the portal density
    pub kappa_prime: u32,
    /// ⌈log₂ Δ⌉, at least 1
    pub delta: u32,
}

impl PortalParams {
    pub fn new(eps: Q, kappa: u32, delta: u32) -> Self {
        PortalParams { eps, kappa, kappa_prime: 2 * kappa + 2, delta: delta.max(1) }
    }

    /// Portal net radius as a fraction of the part diameter.
    pub fn beta(&self) -> Q {
        self.eps / Q::from_integer(4 * i64::from(self.kappa_prime) * i64::from(self.delta))
    }

    /// Upper bound on portals per part, `(8κ'δ/ε)^κ`.
    pub fn portal_bound(&self) -> f64 {
        let base = 8.0 * f64::from(self.kappa_prime) * f64::from(self.delta) / crate::rational::to_f64(&self.eps);
        base.powi(self.kappa as i32)
    }

    /// Upper bound on portal edges per split, `(16κ'δ/ε)^{2κ}`.
    pub fn portal_edge_bound(&self) -> f64 {
        let base = 16.0 * f64::from(self.kappa_prime) * f64::from(self.delta) / crate::rational::to_f64(&self.eps);
        base.powi(2 * self.kappa as i32)
    }
}

/// `⌈log₂ Δ⌉` of the normalized metric, at least 1.
pub fn log_aspect_ceil(m: &MetricInstance) -> u32 {
    let delta = m.aspect_ratio();
    let mut bits = 0u32;
    while Q::from_integer(1i64 << bits) < delta {
        bits += 1;
    }
    bits.max(1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub id: usize,
    /// sorted vertex ids
    pub vertices: Vec<usize>,
    /// depth in cluster levels, root = 0
    pub level: usize,
    /// diameter in ticks
    pub diameter: i64,
}

impl Cluster {
    pub fn diameter_q(&self, m: &MetricInstance) -> Q {
        m.normalized(self.diameter)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitNode {
    pub parent: usize,
    /// parts in net-center order, each sorted
    pub parts: Vec<Vec<usize>>,
    /// portal set of each part, empty until attached
    pub portals: Vec<Vec<usize>>,
    /// cluster id of each part, filled in by the tree builder
    pub children: Vec<usize>,
    pub seed: u64,
    #[serde(skip)]
    part_of: BTreeMap<usize, usize>,
}

impl SplitNode {
    pub fn part_of(&self, v: usize) -> Option<usize> {
        self.part_of.get(&v).copied()
    }

    fn crosses(&self, u: usize, v: usize) -> bool {
        self.part_of(u) != self.part_of(v)
    }
}

/// Deterministic 64-bit mix.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn set_hash(vertices: &[usize]) -> u64 {
    vertices.iter().fold(0x5151_u64, |h, &v| mix64(h ^ (v as u64 + 1)))
}

/// Seed for split `j` of the cluster with the given vertex set.
pub fn split_seed(seed: u64, vertices: &[usize], j: usize) -> u64 {
    mix64(seed ^ mix64(set_hash(vertices) ^ (j as u64).wrapping_mul(0x2545_f491_4f6c_dd1d)))
}

/// Parts are the balls of a random Δ_C/4-net of the cluster.
pub fn random_partition(
    m: &MetricInstance,
    cluster: &Cluster,
    seed: u64,
) -> Result<SplitNode, DecompositionError> {
    if cluster.vertices.len() < 2 {
        return Err(DecompositionError::Singleton);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = Q::new(cluster.diameter, 4);
    let net = m.greedy_net_ticks(&cluster.vertices, radius, &mut rng);
    let index: HashMap<usize, usize> = net.centers.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut parts = vec![Vec::new(); net.centers.len()];
    let mut part_of = BTreeMap::new();
    for (&v, c) in &net.assignment {
        let p = index[c];
        parts[p].push(v);
        part_of.insert(v, p);
    }
    Ok(SplitNode { parent: cluster.id, parts, portals: Vec::new(), children: Vec::new(), seed, part_of })
}

/// Portal set of each part is a βΔ_part-net of the part.
pub fn attach_portals(m: &MetricInstance, mut split: SplitNode, params: &PortalParams) -> SplitNode {
    let beta = params.beta();
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(split.seed ^ 0x00f0_12a1));
    split.portals = split
        .parts
        .iter()
        .map(|part| {
            let radius = beta * Q::from_integer(m.subset_diameter_ticks(part));
            let mut c = m.greedy_net_ticks(part, radius, &mut rng).centers;
            c.sort_unstable();
            c
        })
        .collect();
    split
}

/// Candidate pairs whose endpoints fall in different parts.
pub fn bridge_edges(split: &SplitNode, candidates: &[(usize, usize)]) -> Vec<(usize, usize)> {
    candidates.iter().copied().filter(|&(u, v)| split.crosses(u, v)).collect()
}

/// All pairs of portals from different parts, checked against the edge bound.
pub fn portal_edges(split: &SplitNode, params: &PortalParams) -> Result<Vec<(usize, usize)>, DecompositionError> {
    let mut out = Vec::new();
    for i in 0..split.portals.len() {
        for j in i + 1..split.portals.len() {
            for &u in &split.portals[i] {
                for &v in &split.portals[j] {
                    out.push((u.min(v), u.max(v)));
                }
            }
        }
    }
    let bound = params.portal_edge_bound();
    if out.len() as f64 > bound {
        return Err(DecompositionError::PortalBound { count: out.len(), bound: format!("{bound:.3e}") });
    }
    Ok(out)
}

/// Steps of the walk that change part.
pub fn crossing_count(w: &Walk, split: &SplitNode) -> usize {
    w.vertices().windows(2).filter(|p| split.crosses(p[0], p[1])).count()
}

fn nearest_portal(m: &MetricInstance, split: &SplitNode, v: usize) -> usize {
    let p = split.part_of(v).expect("vertex in the split cluster");
    *split.portals[p].iter().min_by_key(|&&q| (m.d(v, q), q)).expect("portals attached")
}

/// Routes every crossing step through the nearest portal on each side.
pub fn make_portal_respecting(m: &MetricInstance, w: &Walk, split: &SplitNode) -> Walk {
    let v = w.vertices();
    let mut out: Vec<usize> = Vec::with_capacity(v.len());
    let push = |out: &mut Vec<usize>, x: usize| {
        if out.last() != Some(&x) {
            out.push(x);
        }
    };
    for (i, &x) in v.iter().enumerate() {
        if i > 0 && split.crosses(v[i - 1], x) {
            push(&mut out, nearest_portal(m, split, v[i - 1]));
            push(&mut out, nearest_portal(m, split, x));
            push(&mut out, x);
        } else {
            out.push(x);
        }
    }
    Walk::new(m, out)
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaSplitTree {
    pub gamma: usize,
    pub leaf_size: usize,
    pub seed: u64,
    /// cluster levels from root to deepest leaf
    pub height: usize,
    pub clusters: Vec<Cluster>,
    pub splits: Vec<SplitNode>,
    /// split ids under each cluster, empty for leaves
    pub cluster_splits: Vec<Vec<usize>>,
    #[serde(skip)]
    pub beta: Q,
}

impl GammaSplitTree {
    pub fn root(&self) -> &Cluster {
        &self.clusters[0]
    }

    pub fn is_leaf(&self, c: usize) -> bool {
        self.cluster_splits[c].is_empty()
    }

    /// Id of the cluster with exactly these (sorted) vertices.
    pub fn find(&self, vertices: &[usize]) -> Option<usize> {
        self.clusters.iter().position(|c| c.vertices == vertices)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("serializable");
        v["beta"] = serde_json::Value::String(format_q(&self.beta));
        v
    }

    /// Exhaustive structural check of every node.
    pub fn validate(&self, m: &MetricInstance) -> Result<(), String> {
        for (c, splits) in self.cluster_splits.iter().enumerate() {
            let cl = &self.clusters[c];
            if splits.is_empty() {
                if cl.vertices.len() > self.leaf_size {
                    return Err(format!("leaf {c} has {} > {} vertices", cl.vertices.len(), self.leaf_size));
                }
                continue;
            }
            if splits.len() != self.gamma {
                return Err(format!("cluster {c} has {} splits", splits.len()));
            }
            for &s in splits {
                let sp = &self.splits[s];
                let mut all: Vec<usize> = sp.parts.iter().flatten().copied().collect();
                all.sort_unstable();
                if all != cl.vertices {
                    return Err(format!("split {s} is not a partition of cluster {c}"));
                }
                for (i, part) in sp.parts.iter().enumerate() {
                    let d = m.subset_diameter_ticks(part);
                    if 2 * d > cl.diameter {
                        return Err(format!("split {s} part {i} diameter {d} > half of {}", cl.diameter));
                    }
                    let radius = self.beta * Q::from_integer(d);
                    let ports = &sp.portals[i];
                    if ports.is_empty() || ports.iter().any(|p| !part.contains(p)) {
                        return Err(format!("split {s} part {i} has bad portals"));
                    }
                    if part.iter().any(|&u| ports.iter().all(|&p| Q::from_integer(m.d(u, p)) > radius)) {
                        return Err(format!("split {s} part {i} portals do not cover"));
                    }
                    if self.clusters[sp.children[i]].vertices != *part {
                        return Err(format!("split {s} child {i} mismatch"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Builds the tree breadth-first; identical vertex sets share one cluster node.
pub fn build_gamma_split_tree(
    m: &MetricInstance,
    vertices: &[usize],
    gamma: usize,
    leaf_size: usize,
    params: &PortalParams,
    seed: u64,
) -> Result<GammaSplitTree, DecompositionError> {
    if gamma == 0 || leaf_size == 0 {
        return Err(DecompositionError::Parameter("gamma and leaf size must be positive".into()));
    }
    let mut root_set = vertices.to_vec();
    root_set.sort_unstable();
    root_set.dedup();
    if root_set.is_empty() {
        return Err(DecompositionError::Parameter("empty vertex set".into()));
    }
    let mut tree = GammaSplitTree {
        gamma,
        leaf_size,
        seed,
        height: 1,
        clusters: vec![Cluster { id: 0, diameter: m.subset_diameter_ticks(&root_set), vertices: root_set.clone(), level: 0 }],
        splits: Vec::new(),
        cluster_splits: vec![Vec::new()],
        beta: params.beta(),
    };
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(root_set, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        let cluster = tree.clusters[c].clone();
        tree.height = tree.height.max(cluster.level + 1);
        if cluster.vertices.len() <= leaf_size {
            continue;
        }
        for j in 0..gamma {
            let s = split_seed(seed, &cluster.vertices, j);
            let mut split = attach_portals(m, random_partition(m, &cluster, s)?, params);
            for part in &split.parts {
                let id = match index.get(part) {
                    Some(&id) => id,
                    None => {
                        let id = tree.clusters.len();
                        tree.clusters.push(Cluster {
                            id,
                            vertices: part.clone(),
                            level: cluster.level + 1,
                            diameter: m.subset_diameter_ticks(part),
                        });
                        tree.cluster_splits.push(Vec::new());
                        index.insert(part.clone(), id);
                        queue.push_back(id);
                        id
                    }
                };
                split.children.push(id);
            }
            tree.cluster_splits[c].push(tree.splits.len());
            tree.splits.push(split);
        }
    }
    Ok(tree)
}
