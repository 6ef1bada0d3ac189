//! Walks, jumps and excess.
//!
//! A jump of a walk keeps a subsequence of its positions that includes the
//! first and last one. The excess of order μ is the walk length minus the
//! longest jump with μ positions.

use crate::error::PathError;
use crate::metric::MetricInstance;
use serde::{Deserialize, Serialize};

/// Vertex sequence with its length in ticks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Walk {
    vertices: Vec<usize>,
    length: i64,
}

/// Positions (0-based) into a parent walk, first and last included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jump {
    pub positions: Vec<usize>,
    pub length: i64,
}

impl Walk {
    pub fn new(m: &MetricInstance, vertices: Vec<usize>) -> Self {
        let length = m.seq_len(&vertices);
        Walk { vertices, length }
    }

    pub fn single(v: usize) -> Self {
        Walk { vertices: vec![v], length: 0 }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<usize> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Length in ticks.
    pub fn length(&self) -> i64 {
        self.length
    }

    pub fn first(&self) -> Option<usize> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.vertices.last().copied()
    }

    pub fn distinct_count(&self) -> usize {
        let mut v = self.vertices.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    /// Recomputes the length from scratch.
    pub fn recomputed_length(&self, m: &MetricInstance) -> i64 {
        m.seq_len(&self.vertices)
    }

    pub fn subpath(&self, m: &MetricInstance, from: usize, to: usize) -> Result<Walk, PathError> {
        let len = self.vertices.len();
        if from > to {
            return Err(PathError::Reversed(from, to));
        }
        if to >= len {
            return Err(PathError::OutOfRange { index: to, len });
        }
        Ok(Walk::new(m, self.vertices[from..=to].to_vec()))
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(&self, m: &MetricInstance, other: &Walk) -> Walk {
        let mut v = self.vertices.clone();
        match (v.last(), other.vertices.first()) {
            (Some(a), Some(b)) if a == b => v.extend_from_slice(&other.vertices[1..]),
            _ => v.extend_from_slice(&other.vertices),
        }
        Walk::new(m, v)
    }

    /// Direct edge over each position range `(a, b)`; ranges may share endpoints.
    pub fn shortcut(&self, m: &MetricInstance, segments: &[(usize, usize)]) -> Result<Walk, PathError> {
        let len = self.vertices.len();
        let mut segs = segments.to_vec();
        segs.sort_unstable();
        for &(a, b) in &segs {
            if a > b {
                return Err(PathError::Reversed(a, b));
            }
            if b >= len {
                return Err(PathError::OutOfRange { index: b, len });
            }
        }
        for w in segs.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(PathError::Overlap(w[1].0));
            }
        }
        let mut result = Vec::with_capacity(len);
        let mut skip_to: Option<usize> = None;
        for (i, &v) in self.vertices.iter().enumerate() {
            if let Some(t) = skip_to {
                if i < t {
                    continue;
                }
                skip_to = None;
            }
            result.push(v);
            if let Some(&(_, b)) = segs.iter().find(|&&(a, b)| a == i && b > a) {
                skip_to = Some(b);
            }
        }
        Ok(Walk::new(m, result))
    }

    /// Maximal contiguous sub-walks whose vertices all satisfy `inside`.
    pub fn restriction<F: Fn(usize) -> bool>(&self, m: &MetricInstance, inside: F) -> Vec<Walk> {
        let mut parts = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        for &v in &self.vertices {
            if inside(v) {
                cur.push(v);
            } else if !cur.is_empty() {
                parts.push(Walk::new(m, std::mem::take(&mut cur)));
            }
        }
        if !cur.is_empty() {
            parts.push(Walk::new(m, cur));
        }
        parts
    }

    /// Summed length of the restriction.
    pub fn restricted_length<F: Fn(usize) -> bool>(&self, m: &MetricInstance, inside: F) -> i64 {
        self.restriction(m, inside).iter().map(Walk::length).sum()
    }
}

fn check_mu(w: &Walk, mu: usize) -> Result<(), PathError> {
    if w.is_empty() {
        return Err(PathError::Empty);
    }
    if mu < 2 || mu > w.len() {
        return Err(PathError::JumpSize { mu, len: w.len() });
    }
    Ok(())
}

fn jump_length(m: &MetricInstance, w: &Walk, positions: &[usize]) -> i64 {
    positions.windows(2).map(|p| m.d(w.vertices[p[0]], w.vertices[p[1]])).sum()
}

/// Longest μ-jump, lexicographically smallest positions among ties.
pub fn optimal_mu_jump(m: &MetricInstance, w: &Walk, mu: usize) -> Result<Jump, PathError> {
    check_mu(w, mu)?;
    let len = w.len();
    let v = &w.vertices;
    const NONE: i64 = i64::MIN / 4;
    // best[i][c]: longest suffix jump from position i to the end using c positions
    let mut best = vec![vec![NONE; mu + 1]; len];
    best[len - 1][1] = 0;
    for i in (0..len - 1).rev() {
        for c in 2..=mu {
            let mut b = NONE;
            for j in (i + 1)..len {
                let tail = best[j][c - 1];
                if tail > NONE {
                    b = b.max(tail + m.d(v[i], v[j]));
                }
            }
            best[i][c] = b;
        }
    }
    let mut positions = vec![0];
    let (mut i, mut c) = (0usize, mu);
    while c > 1 {
        let target = best[i][c];
        let j = ((i + 1)..len)
            .find(|&j| best[j][c - 1] > NONE && best[j][c - 1] + m.d(v[i], v[j]) == target)
            .expect("an optimal successor exists");
        positions.push(j);
        i = j;
        c -= 1;
    }
    Ok(Jump { length: best[0][mu], positions })
}

pub fn mu_excess(m: &MetricInstance, w: &Walk, mu: usize) -> Result<i64, PathError> {
    Ok(w.length() - optimal_mu_jump(m, w, mu)?.length)
}

/// Excess that tolerates walks shorter than μ (zero there, since the whole walk is a jump).
pub fn excess_or_zero(m: &MetricInstance, w: &Walk, mu: usize) -> i64 {
    if w.len() < 2 {
        return 0;
    }
    mu_excess(m, w, mu.clamp(2, w.len())).unwrap_or(0)
}

/// Positions a_j = ⌈(j−1)(k−1)/(μ−1)⌉ + 1 (1-based), returned 0-based.
pub fn equal_size_positions(k: usize, mu: usize) -> Result<Vec<usize>, PathError> {
    if mu < 2 || k < mu {
        return Err(PathError::JumpSize { mu, len: k });
    }
    Ok((1..=mu).map(|j| ((j - 1) * (k - 1)).div_ceil(mu - 1)).collect())
}

pub fn equal_size_jump(m: &MetricInstance, w: &Walk, mu: usize) -> Result<Jump, PathError> {
    let positions = equal_size_positions(w.len(), mu)?;
    let length = jump_length(m, w, &positions);
    Ok(Jump { positions, length })
}

/// Length of the jump prefix from its first position through its `j`-th (0-based).
pub fn jump_prefix(m: &MetricInstance, w: &Walk, jump: &Jump, j: usize) -> i64 {
    jump_length(m, w, &jump.positions[..=j])
}

/// 2-excess of a vertex sequence: length minus the endpoint distance.
pub fn regret(m: &MetricInstance, seq: &[usize]) -> i64 {
    match (seq.first(), seq.last()) {
        (Some(&a), Some(&b)) => m.seq_len(seq) - m.d(a, b),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[i64]) -> MetricInstance {
        MetricInstance::from_points(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn subpath_cases() {
        let m = line(&[0, 1, 3]);
        let w = Walk::new(&m, vec![0, 1, 2]);
        assert_eq!(w.subpath(&m, 0, 2).unwrap(), w);
        assert_eq!(w.subpath(&m, 1, 1).unwrap().length(), 0);
        let s = w.subpath(&m, 1, 2).unwrap();
        assert_eq!((s.vertices(), s.length()), (&[1, 2][..], 2));
        assert!(w.subpath(&m, 2, 1).is_err());
        assert!(w.subpath(&m, 0, 3).is_err());
    }

    #[test]
    fn jump_extremes_and_uniform_case() {
        let m = MetricInstance::uniform(4);
        let w = Walk::new(&m, vec![0, 1, 2, 3]);
        assert_eq!(optimal_mu_jump(&m, &w, 4).unwrap().length, 3);
        assert_eq!(optimal_mu_jump(&m, &w, 2).unwrap().length, 1);
        let j = optimal_mu_jump(&m, &w, 3).unwrap();
        assert_eq!(j.length, 2);
        assert_eq!(j.positions, vec![0, 1, 3]);
        assert!(optimal_mu_jump(&m, &w, 1).is_err());
        assert!(optimal_mu_jump(&m, &w, 5).is_err());
    }

    #[test]
    fn excess_cases() {
        let m = line(&[0, 1, 3]);
        assert_eq!(mu_excess(&m, &Walk::new(&m, vec![0, 1, 2]), 2).unwrap(), 0);
        let u = MetricInstance::uniform(4);
        let w = Walk::new(&u, vec![0, 1, 2, 3]);
        assert_eq!(mu_excess(&u, &w, 2).unwrap(), 2);
        assert_eq!(mu_excess(&u, &w, 4).unwrap(), 0);
    }

    #[test]
    fn equal_size_positions_match_formula() {
        let one_based = |k, mu| equal_size_positions(k, mu).unwrap().iter().map(|p| p + 1).collect::<Vec<_>>();
        assert_eq!(one_based(9, 5), vec![1, 3, 5, 7, 9]);
        assert_eq!(one_based(4, 4), vec![1, 2, 3, 4]);
        assert_eq!(one_based(10, 2), vec![1, 10]);
        assert!(equal_size_positions(3, 4).is_err());
    }

    #[test]
    fn shortcut_cases() {
        let u = MetricInstance::uniform(4);
        let w = Walk::new(&u, vec![0, 1, 2, 3]);
        assert_eq!(w.shortcut(&u, &[]).unwrap(), w);
        let all = w.shortcut(&u, &[(0, 3)]).unwrap();
        assert_eq!((all.vertices(), all.length()), (&[0, 3][..], 1));
        let s = w.shortcut(&u, &[(1, 3)]).unwrap();
        assert_eq!((s.vertices(), s.length()), (&[0, 1, 3][..], 2));
        assert!(w.shortcut(&u, &[(0, 2), (1, 3)]).is_err());
        let adj = w.shortcut(&u, &[(0, 1), (1, 3)]).unwrap();
        assert_eq!(adj.vertices(), &[0, 1, 3]);
    }

    #[test]
    fn restriction_splits_at_exits() {
        let m = line(&[0, 1, 2, 10, 11]);
        let w = Walk::new(&m, vec![0, 1, 3, 2, 4]);
        let parts = w.restriction(&m, |v| v <= 2);
        assert_eq!(parts.len(), 2);
        assert_eq!(w.restricted_length(&m, |v| v <= 2), 1);
    }
}
