//! Per-cluster path tables over the γ-split-tree.
//!
//! For a cluster C the table holds, for every vertex set U ⊆ C and x, y ∈ U,
//! the length of the shortest simple x–y path inside C with vertex set
//! exactly U. A leaf is solved by subset enumeration. Any other cluster runs,
//! for each of its splits, a chain program that alternates segments inside
//! one part (looked up in the part's table) with crossing steps between
//! parts. The sparse regime bounds the number of crossings; the dense regime
//! restricts crossings to portal pairs.

use crate::decomposition::{GammaSplitTree, SplitNode};
use crate::metric::{MetricInstance, INF};

pub type Mask = u32;

/// Compressed table over (U, x, y) with x, y ∈ U.
#[derive(Debug, Clone)]
pub struct Table {
    pub m: usize,
    offs: Vec<usize>,
    vals: Vec<i64>,
    /// split index * 2 + regime; `LEAF` for leaves
    choice: Vec<u8>,
}

pub const LEAF: u8 = u8::MAX;
const NO_CHOICE: u8 = u8::MAX - 1;

#[inline]
fn rank(u: Mask, x: usize) -> usize {
    (u & ((1 << x) - 1)).count_ones() as usize
}

impl Table {
    fn empty(m: usize) -> Self {
        let mut offs = Vec::with_capacity(1 << m);
        let mut total = 0usize;
        for u in 0..(1u32 << m) {
            offs.push(total);
            let k = u.count_ones() as usize;
            total += k * k;
        }
        Table { m, offs, vals: vec![INF; total], choice: vec![NO_CHOICE; total] }
    }

    #[inline]
    fn idx(&self, x: usize, y: usize, u: Mask) -> usize {
        let k = u.count_ones() as usize;
        self.offs[u as usize] + rank(u, x) * k + rank(u, y)
    }

    /// Local indices; `u` must contain both endpoints.
    #[inline]
    pub fn get(&self, x: usize, y: usize, u: Mask) -> i64 {
        self.vals[self.idx(x, y, u)]
    }

    fn choice(&self, x: usize, y: usize, u: Mask) -> u8 {
        self.choice[self.idx(x, y, u)]
    }
}

/// Dense rows for one start vertex: `vals[u * m + y]`.
#[derive(Debug, Clone)]
pub struct Row {
    pub x: usize,
    pub m: usize,
    pub vals: Vec<i64>,
    choice: Vec<u8>,
}

impl Row {
    #[inline]
    pub fn get(&self, y: usize, u: Mask) -> i64 {
        self.vals[u as usize * self.m + y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    Sparse,
    Dense,
}

struct PartInfo {
    /// cluster-local indices of the part's vertices, ascending
    locals: Vec<usize>,
    mask: Mask,
    child: usize,
    /// part-local subset -> cluster-local mask
    expand: Vec<Mask>,
}

/// One split of one cluster, in cluster-local coordinates.
struct Chain<'a> {
    m: usize,
    dist: &'a [i64],
    part_of: Vec<usize>,
    /// position of each cluster-local vertex inside its part
    part_pos: Vec<usize>,
    parts: Vec<PartInfo>,
    portal: Vec<bool>,
}

/// Predecessor links of one chain run.
struct Links {
    /// at-state -> (previous done set, entry vertex, previous level)
    at: Vec<(Mask, u8, u8)>,
    /// pending-state -> (exit vertex, previous level)
    pend: Vec<(u8, u8)>,
}

struct ChainRun {
    levels: usize,
    at: Vec<i64>,
    links: Option<Links>,
}

impl<'a> Chain<'a> {
    fn new(m: usize, dist: &'a [i64], verts: &[usize], split: &SplitNode) -> Self {
        let local = |v: usize| verts.binary_search(&v).expect("part inside cluster");
        let mut part_of = vec![0; m];
        let mut part_pos = vec![0; m];
        let mut portal = vec![false; m];
        let mut parts = Vec::with_capacity(split.parts.len());
        for (p, part) in split.parts.iter().enumerate() {
            let locals: Vec<usize> = part.iter().map(|&v| local(v)).collect();
            let mut mask = 0;
            for (i, &l) in locals.iter().enumerate() {
                part_of[l] = p;
                part_pos[l] = i;
                mask |= 1 << l;
            }
            for &q in &split.portals[p] {
                portal[local(q)] = true;
            }
            let expand = (0..(1u32 << locals.len()))
                .map(|s| locals.iter().enumerate().filter(|&(i, _)| s & (1 << i) != 0).fold(0, |acc, (_, &l)| acc | (1 << l)))
                .collect();
            parts.push(PartInfo { locals, mask, child: split.children[p], expand });
        }
        Chain { m, dist, part_of, part_pos, parts, portal }
    }

    fn compress(&self, p: usize, cmask: Mask) -> Mask {
        self.parts[p].locals.iter().enumerate().filter(|&(_, &l)| cmask & (1 << l) != 0).fold(0, |acc, (i, _)| acc | (1 << i))
    }

    /// Forward program from `x`; `cap` bounds crossings in the sparse regime.
    fn run(&self, tables: &[Option<Table>], x: usize, regime: Regime, cap: Option<usize>, keep_links: bool) -> ChainRun {
        let m = self.m;
        let levels = match (regime, cap) {
            (Regime::Sparse, Some(c)) => c + 1,
            _ => 1,
        };
        let size = (1usize << m) * m * levels;
        let at_i = |t: Mask, v: usize, c: usize| ((t as usize) * m + v) * levels + c;
        let mut at = vec![INF; size];
        let mut pend = vec![INF; size];
        let mut links = keep_links.then(|| Links { at: vec![(0, 0, 0); size], pend: vec![(0, 0); size] });
        pend[at_i(0, x, 0)] = 0;
        let full: Mask = ((1u64 << m) - 1) as Mask;
        for t in 0..=full {
            if t != 0 && t & (1 << x) == 0 {
                continue;
            }
            // crossing steps out of completed segments
            if t != 0 {
                for a in 0..m {
                    if t & (1 << a) == 0 || (regime == Regime::Dense && !self.portal[a]) {
                        continue;
                    }
                    for c in 0..levels {
                        let base = at[at_i(t, a, c)];
                        if base >= INF {
                            continue;
                        }
                        let nc = if levels > 1 { c + 1 } else { 0 };
                        if nc >= levels && levels > 1 {
                            continue;
                        }
                        for b in 0..m {
                            if t & (1 << b) != 0 || self.part_of[b] == self.part_of[a] {
                                continue;
                            }
                            if regime == Regime::Dense && !self.portal[b] {
                                continue;
                            }
                            let cand = base + self.dist[a * m + b];
                            let k = at_i(t, b, nc);
                            if cand < pend[k] {
                                pend[k] = cand;
                                if let Some(l) = links.as_mut() {
                                    l.pend[k] = (a as u8, c as u8);
                                }
                            }
                        }
                    }
                }
            }
            // segments inside the entered part
            for b in 0..m {
                if t & (1 << b) != 0 {
                    continue;
                }
                let p = self.part_of[b];
                let part = &self.parts[p];
                let avail = self.compress(p, part.mask & !t);
                let bl = self.part_pos[b];
                let table = tables[part.child].as_ref().expect("child table computed");
                for c in 0..levels {
                    let base = pend[at_i(t, b, c)];
                    if base >= INF {
                        continue;
                    }
                    let rest = avail & !(1 << bl);
                    let mut sub = rest;
                    loop {
                        let seg = sub | (1 << bl);
                        let nt = t | part.expand[seg as usize];
                        let mut bits = seg;
                        while bits != 0 {
                            let al = bits.trailing_zeros() as usize;
                            bits &= bits - 1;
                            let cost = table.get(bl, al, seg);
                            if cost >= INF {
                                continue;
                            }
                            let a = part.locals[al];
                            let k = at_i(nt, a, c);
                            if base + cost < at[k] {
                                at[k] = base + cost;
                                if let Some(l) = links.as_mut() {
                                    l.at[k] = (t, b as u8, c as u8);
                                }
                            }
                        }
                        if sub == 0 {
                            break;
                        }
                        sub = (sub - 1) & rest;
                    }
                }
            }
        }
        ChainRun { levels, at, links }
    }
}

/// Tables for every non-root cluster plus lazily computed root rows.
pub struct SplitTreeTables {
    pub tree: GammaSplitTree,
    pub tables: Vec<Option<Table>>,
    dists: Vec<Vec<i64>>,
    sparse_cap: usize,
    /// clusters where a practical cap was tighter than needed
    pub cap_bound: bool,
    crossing_cap: Option<usize>,
    pub entries: u64,
}

impl SplitTreeTables {
    /// Builds all tables except the root's, children first.
    pub fn build(m: &MetricInstance, tree: GammaSplitTree, sparse_cap: usize, crossing_cap: Option<usize>) -> Self {
        let mut order: Vec<usize> = (1..tree.clusters.len()).collect();
        order.sort_by_key(|&c| (tree.clusters[c].vertices.len(), c));
        let mut s = SplitTreeTables {
            tables: vec![None; tree.clusters.len()],
            dists: tree
                .clusters
                .iter()
                .map(|c| c.vertices.iter().flat_map(|&u| c.vertices.iter().map(move |&v| m.d(u, v))).collect())
                .collect(),
            sparse_cap,
            cap_bound: false,
            crossing_cap,
            entries: 0,
            tree,
        };
        for c in order {
            let t = s.cluster_table(c);
            s.entries += t.vals.len() as u64;
            s.tables[c] = Some(t);
        }
        s
    }

    fn limit(&self) -> usize {
        self.crossing_cap.map_or(self.sparse_cap, |c| c.min(self.sparse_cap))
    }

    /// Regimes to run and the sparse crossing cap, `None` when it cannot bind.
    fn regimes(&mut self, size: usize) -> Vec<(Regime, Option<usize>)> {
        let lim = self.limit();
        if lim + 1 >= size {
            vec![(Regime::Sparse, None)]
        } else {
            if self.crossing_cap.is_some_and(|c| c < self.sparse_cap) {
                self.cap_bound = true;
            }
            vec![(Regime::Sparse, Some(lim)), (Regime::Dense, None)]
        }
    }

    fn leaf_rows(&self, c: usize, x: usize) -> Row {
        let verts = &self.tree.clusters[c].vertices;
        let m = verts.len();
        let dist = &self.dists[c];
        let mut vals = vec![INF; (1 << m) * m];
        vals[(1 << x) * m + x] = 0;
        for u in 1..(1u32 << m) {
            if u & (1 << x) == 0 {
                continue;
            }
            for v in 0..m {
                let cur = vals[u as usize * m + v];
                if cur >= INF {
                    continue;
                }
                for w in 0..m {
                    if u & (1 << w) == 0 {
                        let k = (u | (1 << w)) as usize * m + w;
                        vals[k] = vals[k].min(cur + dist[v * m + w]);
                    }
                }
            }
        }
        Row { x, m, vals, choice: vec![LEAF; (1 << m) * m] }
    }

    /// Dense rows from `x` for cluster `c`.
    fn rows(&mut self, c: usize, x: usize) -> Row {
        if self.tree.is_leaf(c) {
            return self.leaf_rows(c, x);
        }
        let m = self.tree.clusters[c].vertices.len();
        let regimes = self.regimes(m);
        let this = &*self;
        let tree = &this.tree;
        let verts = &tree.clusters[c].vertices;
        let mut row = Row { x, m, vals: vec![INF; (1 << m) * m], choice: vec![NO_CHOICE; (1 << m) * m] };
        for (j, &sid) in tree.cluster_splits[c].iter().enumerate() {
            let chain = Chain::new(m, &this.dists[c], verts, &tree.splits[sid]);
            for (r, &(regime, cap)) in regimes.iter().enumerate() {
                let run = chain.run(&this.tables, x, regime, cap, false);
                for u in 0..(1usize << m) {
                    if u & (1 << x) == 0 {
                        continue;
                    }
                    for y in 0..m {
                        let k = (u * m + y) * run.levels;
                        let best = run.at[k..k + run.levels].iter().copied().min().unwrap_or(INF);
                        let slot = u * m + y;
                        if best < row.vals[slot] {
                            row.vals[slot] = best;
                            row.choice[slot] = (j * 2 + r) as u8;
                        }
                    }
                }
            }
        }
        // single-vertex path
        row.vals[(1 << x) * m + x] = 0;
        row
    }

    fn cluster_table(&mut self, c: usize) -> Table {
        let m = self.tree.clusters[c].vertices.len();
        let mut t = Table::empty(m);
        for x in 0..m {
            let row = self.rows(c, x);
            for u in 0..(1u32 << m) {
                if u & (1 << x) == 0 {
                    continue;
                }
                for y in 0..m {
                    if u & (1 << y) == 0 {
                        continue;
                    }
                    let k = t.idx(x, y, u);
                    t.vals[k] = row.vals[u as usize * m + y];
                    t.choice[k] = row.choice[u as usize * m + y];
                }
            }
        }
        t
    }

    /// Rows of the root cluster from global vertex `x`, indexed by global ids.
    pub fn root_row(&mut self, x: usize) -> Row {
        let root = &self.tree.clusters[0];
        let lx = root.vertices.binary_search(&x).expect("start in root cluster");
        self.rows(0, lx)
    }

    /// Global vertex sequence of the path behind `row.get(y, u)`.
    pub fn root_path(&self, row: &Row, y: usize, u: Mask) -> Vec<usize> {
        let verts = &self.tree.clusters[0].vertices;
        let ly = verts.binary_search(&y).expect("end in root cluster");
        let lu = self.globalize_mask_inverse(0, u);
        self.path_with_choice(0, row.x, ly, lu, row.choice[lu as usize * row.m + ly])
    }

    /// Converts a global vertex mask into the root-local one.
    fn globalize_mask_inverse(&self, c: usize, u: Mask) -> Mask {
        let verts = &self.tree.clusters[c].vertices;
        verts.iter().enumerate().filter(|&(_, &v)| u & (1 << v) != 0).fold(0, |acc, (i, _)| acc | (1 << i))
    }

    fn path_with_choice(&self, c: usize, x: usize, y: usize, u: Mask, choice: u8) -> Vec<usize> {
        let verts = &self.tree.clusters[c].vertices;
        let m = verts.len();
        if u == 1 << x && x == y {
            return vec![verts[x]];
        }
        if choice == LEAF || self.tree.is_leaf(c) {
            return self.leaf_path(c, x, y, u);
        }
        let j = (choice / 2) as usize;
        let sid = self.tree.cluster_splits[c][j];
        let chain = Chain::new(m, &self.dists[c], verts, &self.tree.splits[sid]);
        let regime = if choice.is_multiple_of(2) { Regime::Sparse } else { Regime::Dense };
        let lim = self.limit();
        let cap = (regime == Regime::Sparse && lim + 1 < m).then_some(lim);
        let run = chain.run(&self.tables, x, regime, cap, true);
        let links = run.links.as_ref().expect("links kept");
        let levels = run.levels;
        let at_i = |t: Mask, v: usize, c: usize| ((t as usize) * m + v) * levels + c;
        let mut lvl = (0..levels).min_by_key(|&l| (run.at[at_i(u, y, l)], l)).expect("levels");
        let (mut t, mut v) = (u, y);
        let mut segments: Vec<(usize, usize, Mask)> = Vec::new();
        loop {
            let (prev, b, pl) = links.at[at_i(t, v, lvl)];
            segments.push((b as usize, v, t & !prev));
            if prev == 0 {
                break;
            }
            let (a, al) = links.pend[at_i(prev, b as usize, pl as usize)];
            t = prev;
            v = a as usize;
            lvl = al as usize;
        }
        segments.reverse();
        let mut out = Vec::new();
        for (b, a, seg) in segments {
            let p = chain.part_of[b];
            let part = &chain.parts[p];
            let child = part.child;
            let sub = chain.compress(p, seg);
            let table = self.tables[child].as_ref().expect("child table");
            let (bl, al) = (chain.part_pos[b], chain.part_pos[a]);
            out.extend(self.path_with_choice(child, bl, al, sub, table.choice(bl, al, sub)));
        }
        out
    }

    fn leaf_path(&self, c: usize, x: usize, y: usize, u: Mask) -> Vec<usize> {
        let verts = &self.tree.clusters[c].vertices;
        let row = self.leaf_rows(c, x);
        let m = verts.len();
        let dist = &self.dists[c];
        let (mut mask, mut v) = (u, y);
        let mut seq = vec![verts[v]];
        while mask != 1 << x {
            let prev = mask & !(1 << v);
            let target = row.vals[mask as usize * m + v];
            let w = (0..m)
                .find(|&w| prev & (1 << w) != 0 && row.vals[prev as usize * m + w] + dist[w * m + v] == target)
                .expect("leaf predecessor");
            mask = prev;
            v = w;
            seq.push(verts[v]);
        }
        seq.reverse();
        seq
    }
}
