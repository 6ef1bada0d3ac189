//! Graphs and tree decompositions.

use crate::error::TreeDecompositionError;
use crate::metric::MetricInstance;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// Weighted undirected graph with weights in ticks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    /// `(u, v, w)` with `u < v`, sorted, no parallel edges
    pub edges: Vec<(usize, usize, i64)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut es: Vec<(usize, usize, i64)> = edges
            .into_iter()
            .filter(|(u, v, _)| u != v)
            .map(|(u, v, w)| (u.min(v), u.max(v), w))
            .collect();
        es.sort_unstable();
        // keep the lightest of parallel edges
        es.dedup_by(|b, a| a.0 == b.0 && a.1 == b.1);
        Graph { n, edges: es }
    }

    /// Graph edges of the metric if it came from a graph, the complete graph otherwise.
    pub fn from_metric(m: &MetricInstance) -> Self {
        match m.graph_edges() {
            Some(es) => Graph::new(m.n(), es.iter().copied()),
            None => {
                let n = m.n();
                Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, m.d(u, v)))))
            }
        }
    }

    pub fn neighbors(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.n];
        for &(u, v, _) in &self.edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        adj
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    /// sorted vertex lists
    pub bags: Vec<Vec<usize>>,
    pub tree: Vec<(usize, usize)>,
    pub root: usize,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<Vec<usize>>, tree: Vec<(usize, usize)>, root: usize) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, tree, root }
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree {
            adj[a].push(b);
            adj[b].push(a);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Parent of every bag when rooted at `root`; the root maps to itself.
    pub fn parents(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut parent = vec![usize::MAX; self.bags.len()];
        parent[self.root] = self.root;
        let mut queue = VecDeque::from([self.root]);
        while let Some(b) = queue.pop_front() {
            for &c in &adj[b] {
                if parent[c] == usize::MAX {
                    parent[c] = b;
                    queue.push_back(c);
                }
            }
        }
        parent
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let parent = self.parents();
        let mut ch = vec![Vec::new(); self.bags.len()];
        for (b, &p) in parent.iter().enumerate() {
            if b != self.root {
                ch[p].push(b);
            }
        }
        ch
    }

    pub fn is_binary(&self) -> bool {
        self.children().iter().all(|c| c.len() <= 2)
    }
}

/// Checks the three decomposition conditions and that the bag graph is a tree.
pub fn validate_tree_decomposition(g: &Graph, td: &TreeDecomposition) -> Result<(), TreeDecompositionError> {
    let nb = td.bags.len();
    if nb == 0 {
        return Err(TreeDecompositionError::NotATree("no bags".into()));
    }
    if td.root >= nb {
        return Err(TreeDecompositionError::NotATree(format!("root {} out of range", td.root)));
    }
    if td.tree.len() != nb - 1 {
        return Err(TreeDecompositionError::NotATree(format!("{} edges for {} bags", td.tree.len(), nb)));
    }
    if td.tree.iter().any(|&(a, b)| a >= nb || b >= nb || a == b) {
        return Err(TreeDecompositionError::NotATree("bad tree edge".into()));
    }
    if td.parents().contains(&usize::MAX) {
        return Err(TreeDecompositionError::NotATree("bag tree is disconnected".into()));
    }
    for (b, bag) in td.bags.iter().enumerate() {
        if let Some(&v) = bag.iter().find(|&&v| v >= g.n) {
            return Err(TreeDecompositionError::UnknownVertex(b, v));
        }
    }
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); g.n];
    for (b, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            holders[v].push(b);
        }
    }
    if let Some(v) = holders.iter().position(Vec::is_empty) {
        return Err(TreeDecompositionError::MissingVertex(v));
    }
    for &(u, v, _) in &g.edges {
        if !td.bags.iter().any(|bag| bag.binary_search(&u).is_ok() && bag.binary_search(&v).is_ok()) {
            return Err(TreeDecompositionError::MissingEdge(u, v));
        }
    }
    // bags holding v are connected iff exactly one of them has its parent outside the set
    let parent = td.parents();
    for (v, hs) in holders.iter().enumerate() {
        let tops = hs
            .iter()
            .filter(|&&b| b == td.root || td.bags[parent[b]].binary_search(&v).is_err())
            .count();
        if tops != 1 {
            return Err(TreeDecompositionError::Disconnected(v));
        }
    }
    Ok(())
}

/// Min-degree elimination; ties go to the smallest vertex id.
pub fn heuristic_tree_decomposition(g: &Graph) -> TreeDecomposition {
    let n = g.n;
    if n == 0 {
        return TreeDecomposition::new(vec![vec![]], vec![], 0);
    }
    let mut adj = g.neighbors();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut bags = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (adj[v].len(), v)).expect("vertex left");
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        let mut bag = nbrs.clone();
        bag.push(v);
        bags.push(bag);
        for &a in &nbrs {
            adj[a].remove(&v);
            for &b in &nbrs {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        alive[v] = false;
        order.push(v);
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // bag i hangs off the bag of its earliest-eliminated remaining neighbor
    let mut tree = Vec::new();
    for (i, bag) in bags.iter().enumerate() {
        let v = order[i];
        let next = bag.iter().filter(|&&u| u != v).map(|&u| pos[u]).min();
        match next {
            Some(j) => tree.push((i, j)),
            None if i + 1 < n => tree.push((i, i + 1)),
            None => {}
        }
    }
    TreeDecomposition::new(bags, tree, n - 1)
}

/// Splits every node with more than two children by chaining copies of its bag.
pub fn binarize(td: &TreeDecomposition) -> TreeDecomposition {
    let children = td.children();
    let mut bags = td.bags.clone();
    let mut tree = Vec::new();
    for (b, ch) in children.iter().enumerate() {
        if ch.len() <= 2 {
            tree.extend(ch.iter().map(|&c| (b, c)));
            continue;
        }
        let mut host = b;
        for (i, &c) in ch.iter().enumerate() {
            let last = i + 1 == ch.len();
            if i == 0 || last {
                tree.push((host, c));
                continue;
            }
            let copy = bags.len();
            bags.push(td.bags[b].clone());
            tree.push((host, copy));
            host = copy;
            tree.push((host, c));
        }
    }
    TreeDecomposition { bags, tree, root: td.root }
}

/// A binarized decomposition rooted for the dynamic program.
#[derive(Debug, Clone)]
pub struct RootedDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub children: Vec<Vec<usize>>,
    pub root: usize,
    /// graph edges owned by each bag: those whose root-most common bag it is
    pub local_edges: Vec<Vec<usize>>,
    /// children before parents
    pub postorder: Vec<usize>,
}

impl RootedDecomposition {
    pub fn new(g: &Graph, td: &TreeDecomposition) -> Result<Self, TreeDecompositionError> {
        validate_tree_decomposition(g, td)?;
        let td = if td.is_binary() { td.clone() } else { binarize(td) };
        let children = td.children();
        let mut depth = vec![0usize; td.bags.len()];
        let mut order = vec![td.root];
        let mut i = 0;
        while i < order.len() {
            let b = order[i];
            for &c in &children[b] {
                depth[c] = depth[b] + 1;
                order.push(c);
            }
            i += 1;
        }
        let mut local_edges = vec![Vec::new(); td.bags.len()];
        for (e, &(u, v, _)) in g.edges.iter().enumerate() {
            let owner = (0..td.bags.len())
                .filter(|&b| td.bags[b].binary_search(&u).is_ok() && td.bags[b].binary_search(&v).is_ok())
                .min_by_key(|&b| (depth[b], b))
                .expect("validated");
            local_edges[owner].push(e);
        }
        order.reverse();
        Ok(RootedDecomposition { bags: td.bags, children, root: td.root, local_edges, postorder: order })
    }

    /// Bag where each vertex is forgotten: the root-most bag holding it.
    pub fn token_map(&self, n: usize) -> Vec<usize> {
        let mut token = vec![usize::MAX; n];
        for &b in self.postorder.iter().rev() {
            for &v in &self.bags[b] {
                if token[v] == usize::MAX {
                    token[v] = b;
                }
            }
        }
        token
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1, 1)))
    }

    #[test]
    fn validation_cases() {
        let g = path_graph(4);
        let one = TreeDecomposition::new(vec![vec![0, 1, 2, 3]], vec![], 0);
        assert!(validate_tree_decomposition(&g, &one).is_ok());
        assert_eq!(one.width(), 3);
        let chain = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2], vec![2, 3]], vec![(0, 1), (1, 2)], 0);
        assert!(validate_tree_decomposition(&g, &chain).is_ok());
        assert_eq!(chain.width(), 1);
        let missing = TreeDecomposition::new(vec![vec![0, 1], vec![1], vec![2, 3]], vec![(0, 1), (1, 2)], 0);
        assert_eq!(validate_tree_decomposition(&g, &missing), Err(TreeDecompositionError::MissingEdge(1, 2)));
        let split = TreeDecomposition::new(vec![vec![0, 1], vec![2, 3], vec![1, 2]], vec![(0, 1), (1, 2)], 0);
        assert_eq!(validate_tree_decomposition(&g, &split), Err(TreeDecompositionError::Disconnected(1)));
    }

    #[test]
    fn heuristic_widths() {
        let star = Graph::new(5, (1..5).map(|i| (0, i, 1)));
        let td = heuristic_tree_decomposition(&star);
        assert!(validate_tree_decomposition(&star, &td).is_ok());
        assert_eq!(td.width(), 1);
        let c4 = Graph::new(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]);
        let td = heuristic_tree_decomposition(&c4);
        assert!(validate_tree_decomposition(&c4, &td).is_ok());
        assert_eq!(td.width(), 2);
        let k4 = Graph::new(4, (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v, 1))));
        assert_eq!(heuristic_tree_decomposition(&k4).width(), 3);
    }

    #[test]
    fn binarize_star_of_bags() {
        let g = Graph::new(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)]);
        let td = TreeDecomposition::new(vec![vec![0], vec![0, 1], vec![0, 2], vec![0, 3]], vec![(0, 1), (0, 2), (0, 3)], 0);
        let b = binarize(&td);
        assert!(b.is_binary());
        assert_eq!(b.bags.len(), 5);
        assert_eq!(b.width(), td.width());
        assert!(validate_tree_decomposition(&g, &b).is_ok());
        let chain = TreeDecomposition::new(vec![vec![0, 1], vec![0, 2]], vec![(0, 1)], 0);
        assert_eq!(binarize(&chain), chain);
    }

    #[test]
    fn tokens_sit_at_root_most_bags() {
        let g = path_graph(4);
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2], vec![2, 3]], vec![(0, 1), (1, 2)], 1);
        let r = RootedDecomposition::new(&g, &td).unwrap();
        let tok = r.token_map(4);
        assert_eq!(tok, vec![0, 1, 1, 2]);
        assert!(tok.iter().enumerate().all(|(v, &b)| r.bags[b].contains(&v)));
    }
}
