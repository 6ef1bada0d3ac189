//! Profile dynamic program over a rooted binary tree decomposition.
//!
//! Each path keeps, per bag vertex, a component label (0 = untouched) and a
//! degree parity bit, plus a done flag once its last component closes. Edges
//! are chosen with multiplicity 0, 1 or 2 at the bag owning them, so walks
//! that revisit vertices are covered. A vertex's token is counted when it is
//! forgotten, if some path touching it may credit it.

use super::decomp::{Graph, RootedDecomposition};
use crate::error::SolveError;
use crate::metric::INF;
use std::collections::HashMap;

/// One required walk: endpoints and the vertices it may credit.
#[derive(Debug, Clone)]
pub struct PathSpec {
    pub s: usize,
    pub t: usize,
    pub eligible: Vec<bool>,
}

impl PathSpec {
    pub fn all(n: usize, s: usize, t: usize) -> Self {
        PathSpec { s, t, eligible: vec![true; n] }
    }

    fn endpoint_parity(&self, v: usize) -> u8 {
        u8::from(self.s != self.t && (v == self.s || v == self.t))
    }

    fn is_endpoint(&self, v: usize) -> bool {
        v == self.s || v == self.t
    }
}

const PARITY: u8 = 0x80;
const LABEL: u8 = 0x7f;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct State {
    /// path-major cells: `label | parity << 7`
    cells: Vec<u8>,
    done: u32,
    count: u16,
}

#[derive(Debug, Clone, Copy)]
enum Trace {
    Base,
    Edge { prev: u32, path: u8, edge: u32, mult: u8 },
    Merge { a: u32, b: u32 },
}

struct Layer {
    verts: Vec<usize>,
    table: HashMap<State, (i64, u32)>,
}

impl Layer {
    fn sorted(&self) -> Vec<(State, (i64, u32))> {
        let mut v: Vec<_> = self.table.iter().map(|(k, e)| (k.clone(), *e)).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

fn relax(table: &mut HashMap<State, (i64, u32)>, key: State, len: i64, trace: u32) -> bool {
    match table.get_mut(&key) {
        Some(e) if e.0 <= len => false,
        Some(e) => {
            *e = (len, trace);
            true
        }
        None => {
            table.insert(key, (len, trace));
            true
        }
    }
}

/// Relabels components of one path in order of first appearance.
fn canon(cells: &mut [u8]) {
    let mut map = [0u8; 128];
    let mut next = 1u8;
    for c in cells.iter_mut() {
        let l = *c & LABEL;
        if l == 0 {
            continue;
        }
        if map[l as usize] == 0 {
            map[l as usize] = next;
            next += 1;
        }
        *c = (*c & PARITY) | map[l as usize];
    }
}

/// Table of minimum total length per token count, with witnesses.
pub struct ProfileTable {
    /// `best[c]`: (length, trace) of the cheapest solution crediting `c` tokens
    best: Vec<Option<(i64, u32)>>,
    traces: Vec<Trace>,
    edges: Vec<(usize, usize, i64)>,
    specs: Vec<PathSpec>,
    pub states_explored: u64,
}

struct Dp<'a> {
    g: &'a Graph,
    td: &'a RootedDecomposition,
    specs: &'a [PathSpec],
    cap: u16,
    traces: Vec<Trace>,
    explored: u64,
}

impl<'a> Dp<'a> {
    fn sigma(&self) -> usize {
        self.specs.len()
    }

    fn push_trace(&mut self, t: Trace) -> u32 {
        self.traces.push(t);
        (self.traces.len() - 1) as u32
    }

    fn forget(&self, layer: Layer, v: usize) -> Layer {
        let w = layer.verts.len();
        let pos = layer.verts.iter().position(|&x| x == v).expect("vertex in bag");
        let verts: Vec<usize> = layer.verts.iter().copied().filter(|&x| x != v).collect();
        let mut table = HashMap::new();
        'states: for (st, (len, tr)) in layer.sorted() {
            let mut cells = Vec::with_capacity(self.sigma() * (w - 1));
            let mut done = st.done;
            let mut credited = false;
            for (i, spec) in self.specs.iter().enumerate() {
                let row = &st.cells[i * w..(i + 1) * w];
                let c = row[pos];
                let label = c & LABEL;
                if label == 0 {
                    if spec.is_endpoint(v) {
                        continue 'states;
                    }
                } else {
                    if (c & PARITY != 0) != (spec.endpoint_parity(v) == 1) {
                        continue 'states;
                    }
                    credited |= spec.eligible[v];
                    let others = row.iter().enumerate().any(|(p, &x)| p != pos && x & LABEL == label);
                    if !others {
                        if row.iter().enumerate().any(|(p, &x)| p != pos && x & LABEL != 0) {
                            continue 'states;
                        }
                        done |= 1 << i;
                    }
                }
                cells.extend(row.iter().enumerate().filter(|&(p, _)| p != pos).map(|(_, &x)| x));
            }
            for i in 0..self.sigma() {
                canon(&mut cells[i * (w - 1)..(i + 1) * (w - 1)]);
            }
            let count = if credited { (st.count + 1).min(self.cap) } else { st.count };
            relax(&mut table, State { cells, done, count }, len, tr);
        }
        Layer { verts, table }
    }

    fn introduce(&self, layer: Layer, v: usize) -> Layer {
        let w = layer.verts.len();
        let pos = layer.verts.partition_point(|&x| x < v);
        let mut verts = layer.verts.clone();
        verts.insert(pos, v);
        let mut table = HashMap::new();
        'states: for (st, e) in layer.sorted() {
            let mut cells = Vec::with_capacity(self.sigma() * (w + 1));
            for (i, spec) in self.specs.iter().enumerate() {
                let row = &st.cells[i * w..(i + 1) * w];
                let fresh = if spec.is_endpoint(v) {
                    if st.done & (1 << i) != 0 {
                        continue 'states;
                    }
                    LABEL
                } else {
                    0
                };
                let start = cells.len();
                cells.extend_from_slice(&row[..pos]);
                cells.push(fresh);
                cells.extend_from_slice(&row[pos..]);
                canon(&mut cells[start..]);
            }
            relax(&mut table, State { cells, ..st }, e.0, e.1);
        }
        Layer { verts, table }
    }

    fn merge(&mut self, a: Layer, b: Layer) -> Layer {
        debug_assert_eq!(a.verts, b.verts);
        let w = a.verts.len();
        let mut table = HashMap::new();
        let bs = b.sorted();
        for (sa, ea) in a.sorted() {
            'pair: for (sb, eb) in &bs {
                if sa.done & sb.done != 0 {
                    continue;
                }
                let mut cells = Vec::with_capacity(sa.cells.len());
                for i in 0..self.sigma() {
                    let ra = &sa.cells[i * w..(i + 1) * w];
                    let rb = &sb.cells[i * w..(i + 1) * w];
                    let touched_a = ra.iter().any(|&x| x & LABEL != 0);
                    let touched_b = rb.iter().any(|&x| x & LABEL != 0);
                    if (sa.done & (1 << i) != 0 && touched_b) || (sb.done & (1 << i) != 0 && touched_a) {
                        continue 'pair;
                    }
                    // union-find over labels: a's in 0..64, b's in 64..128
                    let mut uf: Vec<u8> = (0..128).collect();
                    fn find(uf: &mut [u8], x: u8) -> u8 {
                        let mut r = x;
                        while uf[r as usize] != r {
                            r = uf[r as usize];
                        }
                        uf[x as usize] = r;
                        r
                    }
                    for p in 0..w {
                        let (la, lb) = (ra[p] & LABEL, rb[p] & LABEL);
                        if la != 0 && lb != 0 {
                            let x = find(&mut uf, la);
                            let y = find(&mut uf, lb + 64);
                            uf[x.max(y) as usize] = x.min(y);
                        }
                    }
                    let start = cells.len();
                    for p in 0..w {
                        let (la, lb) = (ra[p] & LABEL, rb[p] & LABEL);
                        let parity = (ra[p] ^ rb[p]) & PARITY;
                        let label = match (la, lb) {
                            (0, 0) => 0,
                            (0, l) => find(&mut uf, l + 64) + 1,
                            (l, _) => find(&mut uf, l) + 1,
                        };
                        cells.push(parity | label);
                    }
                    canon(&mut cells[start..]);
                }
                let count = (sa.count + sb.count).min(self.cap);
                let tr = self.push_trace(Trace::Merge { a: ea.1, b: eb.1 });
                if !relax(&mut table, State { cells, done: sa.done | sb.done, count }, ea.0 + eb.0, tr) {
                    self.traces.pop();
                }
            }
        }
        Layer { verts: a.verts, table }
    }

    fn add_edge(&mut self, layer: Layer, e: usize) -> Layer {
        let (u, v, wgt) = self.g.edges[e];
        let w = layer.verts.len();
        let pu = layer.verts.binary_search(&u).expect("edge in bag");
        let pv = layer.verts.binary_search(&v).expect("edge in bag");
        let mut cur: Vec<(State, (i64, u32))> = layer.sorted();
        for i in 0..self.sigma() {
            let mut next: HashMap<State, (i64, u32)> = HashMap::new();
            for (st, (len, tr)) in &cur {
                relax(&mut next, st.clone(), *len, *tr);
                if st.done & (1 << i) != 0 {
                    continue;
                }
                for mult in 1..=2u8 {
                    let mut cells = st.cells.clone();
                    let row = &mut cells[i * w..(i + 1) * w];
                    let (lu, lv) = (row[pu] & LABEL, row[pv] & LABEL);
                    let (lu, lv) = (if lu == 0 { 120 } else { lu }, if lv == 0 { 121 } else { lv });
                    row[pu] = (row[pu] & PARITY) | lu;
                    row[pv] = (row[pv] & PARITY) | lv;
                    let (keep, drop) = (lu.min(lv), lu.max(lv));
                    for c in row.iter_mut() {
                        if *c & LABEL == drop {
                            *c = (*c & PARITY) | keep;
                        }
                    }
                    if mult == 1 {
                        row[pu] ^= PARITY;
                        row[pv] ^= PARITY;
                    }
                    canon(row);
                    let key = State { cells, ..st.clone() };
                    let nl = len + i64::from(mult) * wgt;
                    let t = self.push_trace(Trace::Edge { prev: *tr, path: i as u8, edge: e as u32, mult });
                    if !relax(&mut next, key, nl, t) {
                        self.traces.pop();
                    }
                }
            }
            let mut v: Vec<_> = next.into_iter().collect();
            v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
            cur = v;
        }
        Layer { verts: layer.verts, table: cur.into_iter().collect() }
    }

    fn run(&mut self) -> Vec<Option<(i64, u32)>> {
        let td = self.td;
        let mut layers: Vec<Option<Layer>> = (0..td.bags.len()).map(|_| None).collect();
        let base = self.push_trace(Trace::Base);
        for &b in &td.postorder {
            let bag = &td.bags[b];
            let mut lifted = Vec::new();
            for &c in &td.children[b] {
                let mut layer = layers[c].take().expect("child done");
                for v in layer.verts.clone() {
                    if bag.binary_search(&v).is_err() {
                        layer = self.forget(layer, v);
                    }
                }
                for &v in bag {
                    if layer.verts.binary_search(&v).is_err() {
                        layer = self.introduce(layer, v);
                    }
                }
                lifted.push(layer);
            }
            let mut layer = match lifted.len() {
                0 => {
                    let empty = Layer {
                        verts: Vec::new(),
                        table: HashMap::from([(State { cells: Vec::new(), done: 0, count: 0 }, (0, base))]),
                    };
                    bag.iter().fold(empty, |l, &v| self.introduce(l, v))
                }
                1 => lifted.pop().expect("one"),
                _ => {
                    let b2 = lifted.pop().expect("two");
                    let b1 = lifted.pop().expect("two");
                    self.merge(b1, b2)
                }
            };
            for &e in &td.local_edges[b] {
                layer = self.add_edge(layer, e);
            }
            self.explored += layer.table.len() as u64;
            layers[b] = Some(layer);
        }
        let mut root = layers[td.root].take().expect("root done");
        for v in root.verts.clone() {
            root = self.forget(root, v);
        }
        let all_done = (1u32 << self.sigma()) - 1;
        let mut best = vec![None; self.cap as usize + 1];
        for (st, e) in root.sorted() {
            if st.done != all_done {
                continue;
            }
            let slot = &mut best[st.count as usize];
            if slot.is_none_or(|(l, _)| e.0 < l) {
                *slot = Some(e);
            }
        }
        best
    }
}

/// Runs the program for the given walks, counting tokens up to `cap`.
pub fn profile_dp(
    g: &Graph,
    td: &RootedDecomposition,
    specs: &[PathSpec],
    cap: usize,
) -> Result<ProfileTable, SolveError> {
    if specs.is_empty() || specs.len() > 8 {
        return Err(SolveError::Config(format!("{} paths; supported 1..=8", specs.len())));
    }
    if let Some(bad) = specs.iter().find(|s| s.s >= g.n || s.t >= g.n) {
        return Err(SolveError::BadPair(bad.s.max(bad.t)));
    }
    if td.bags.iter().map(Vec::len).max().unwrap_or(0) > 60 {
        return Err(SolveError::Config("bag too large".into()));
    }
    let mut dp = Dp { g, td, specs, cap: cap.min(u16::MAX as usize - 1) as u16, traces: Vec::new(), explored: 0 };
    let best = dp.run();
    Ok(ProfileTable { best, traces: dp.traces, edges: g.edges.clone(), specs: specs.to_vec(), states_explored: dp.explored })
}

impl ProfileTable {
    /// Minimum length crediting exactly `count` tokens (the cap bucket holds "at least").
    pub fn length(&self, count: usize) -> i64 {
        self.best.get(count).copied().flatten().map_or(INF, |e| e.0)
    }

    pub fn cap(&self) -> usize {
        self.best.len() - 1
    }

    /// Largest count whose minimum length fits the budget.
    pub fn max_count_within(&self, budget: i64) -> Option<usize> {
        (0..self.best.len()).rev().find(|&c| self.length(c) <= budget)
    }

    /// Cheapest count at least `k`.
    pub fn min_length_at_least(&self, k: usize) -> Option<(usize, i64)> {
        (k..self.best.len()).map(|c| (c, self.length(c))).filter(|x| x.1 < INF).min_by_key(|x| (x.1, x.0))
    }

    /// Vertex sequences of the walks behind `count`.
    pub fn witness(&self, count: usize) -> Option<Vec<Vec<usize>>> {
        let (_, root) = self.best.get(count).copied().flatten()?;
        let mut mult: Vec<HashMap<usize, u8>> = vec![HashMap::new(); self.specs.len()];
        let mut stack = vec![root];
        while let Some(t) = stack.pop() {
            match self.traces[t as usize] {
                Trace::Base => {}
                Trace::Edge { prev, path, edge, mult: k } => {
                    *mult[path as usize].entry(edge as usize).or_default() += k;
                    stack.push(prev);
                }
                Trace::Merge { a, b } => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        Some(
            self.specs
                .iter()
                .zip(&mult)
                .map(|(spec, ms)| euler_trail(&self.edges, ms, spec.s, spec.t))
                .collect(),
        )
    }
}

/// Hierholzer walk over the edge multiset from `s`; it ends at `t` by parity.
fn euler_trail(edges: &[(usize, usize, i64)], mult: &HashMap<usize, u8>, s: usize, t: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = Vec::new();
    let mut keys: Vec<_> = mult.iter().collect();
    keys.sort();
    for (&e, &k) in keys {
        ids.extend(std::iter::repeat_n(e, k as usize));
    }
    let mut adj: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (slot, &e) in ids.iter().enumerate() {
        let (u, v, _) = edges[e];
        adj.entry(u).or_default().push((v, slot));
        adj.entry(v).or_default().push((u, slot));
    }
    for list in adj.values_mut() {
        list.sort_unstable();
        list.reverse();
    }
    let mut used = vec![false; ids.len()];
    let mut stack = vec![s];
    let mut out = Vec::new();
    while let Some(&x) = stack.last() {
        let next = loop {
            match adj.get_mut(&x).and_then(Vec::pop) {
                Some((y, slot)) if !used[slot] => {
                    used[slot] = true;
                    break Some(y);
                }
                Some(_) => continue,
                None => break None,
            }
        };
        match next {
            Some(y) => stack.push(y),
            None => out.push(stack.pop().expect("nonempty")),
        }
    }
    out.reverse();
    debug_assert_eq!(out.last(), Some(&t));
    out
}

#[cfg(test)]
mod tests {
    use super::super::decomp::{heuristic_tree_decomposition, Graph};
    use super::*;

    fn run(g: &Graph, specs: &[PathSpec], cap: usize) -> ProfileTable {
        let td = RootedDecomposition::new(g, &heuristic_tree_decomposition(g)).unwrap();
        profile_dp(g, &td, specs, cap).unwrap()
    }

    #[test]
    fn zero_length_single_vertex() {
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1)]);
        let t = run(&g, &[PathSpec::all(3, 1, 1)], 0);
        assert_eq!(t.length(0), 0);
        assert_eq!(t.witness(0).unwrap(), vec![vec![1]]);
    }

    #[test]
    fn path_graph_end_to_end() {
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1)]);
        let t = run(&g, &[PathSpec::all(3, 0, 2)], 3);
        assert_eq!(t.min_length_at_least(3).unwrap().1, 2);
        assert_eq!(t.witness(3).unwrap(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn star_walk_revisits_center() {
        let g = Graph::new(4, (1..4).map(|i| (0, i, 1)));
        let t = run(&g, &[PathSpec::all(4, 0, 1)], 3);
        assert_eq!(t.min_length_at_least(3).unwrap().1, 3);
        let w = &t.witness(3).unwrap()[0];
        assert_eq!((w[0], *w.last().unwrap(), w.len()), (0, 1, 4));
    }

    #[test]
    fn two_paths_share_tokens_once() {
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1)]);
        let specs = [PathSpec::all(3, 0, 1), PathSpec::all(3, 1, 2)];
        let t = run(&g, &specs, 3);
        assert_eq!(t.length(3), 2);
        assert_eq!(t.length(2), INF);
    }
}
