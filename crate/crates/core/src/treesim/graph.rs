use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Simple undirected graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) out of range")]
    Range(usize, usize),
    #[error("self loop at {0}")]
    SelfLoop(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is not a tree")]
    NotATree,
}

impl Graph {
    /// Normalizes edges to `(lo, hi)` and drops duplicates.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut es = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::Range(u, v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            es.push((u.min(v), u.max(v)));
        }
        es.sort_unstable();
        es.dedup();
        Ok(Graph { n, edges: es })
    }

    pub fn path(n: usize) -> Self {
        Graph { n, edges: (1..n).map(|i| (i - 1, i)).collect() }
    }

    pub fn complete(n: usize) -> Self {
        Graph { n, edges: (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect() }
    }

    pub fn star(n: usize) -> Self {
        Graph { n, edges: (1..n).map(|i| (0, i)).collect() }
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// Is the induced subgraph on `set` connected? The empty set is not.
    pub fn connected_within(&self, set: &[usize]) -> bool {
        let Some(&start) = set.first() else { return false };
        let mut inside = vec![false; self.n];
        for &v in set {
            inside[v] = true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if inside[w] && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == set.len()
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.connected_within(&(0..self.n).collect::<Vec<_>>())
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.n && self.is_connected()
    }

    pub fn is_acyclic(&self) -> bool {
        let mut dsu: Vec<usize> = (0..self.n).collect();
        fn find(d: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while d[r] != r {
                r = d[r];
            }
            d[x] = r;
            r
        }
        for &(u, v) in &self.edges {
            let (a, b) = (find(&mut dsu, u), find(&mut dsu, v));
            if a == b {
                return false;
            }
            dsu[a] = b;
        }
        true
    }
}

/// A homomorphism `map` from a graph onto `tree` with fibers of size at most `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSimulation {
    pub tree: Graph,
    pub map: Vec<usize>,
    pub k: usize,
}

impl TreeSimulation {
    pub fn fiber(&self, t: usize) -> Vec<usize> {
        (0..self.map.len()).filter(|&v| self.map[v] == t).collect()
    }

    pub fn parts(&self) -> Vec<Vec<usize>> {
        (0..self.tree.n).map(|t| self.fiber(t)).collect()
    }
}

/// The first violated condition.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum SimViolation {
    #[error("target is not a tree")]
    NotATree,
    #[error("map has {got} entries for {n} vertices")]
    MapLength { n: usize, got: usize },
    #[error("vertex {vertex} maps outside the tree")]
    OutOfRange { vertex: usize },
    #[error("edge ({0}, {1}) has no tree image", edge.0, edge.1)]
    NotHomomorphic { edge: (usize, usize) },
    #[error("part {part} has {size} vertices")]
    TooLarge { part: usize, size: usize },
    #[error("part {part} is disconnected")]
    Disconnected { part: usize },
}

/// Checks that `map` is a homomorphism `g → t` whose nonempty fibers are
/// connected and hold at most `k` vertices. Edges inside a fiber are allowed.
pub fn verify_k_simulation(g: &Graph, t: &Graph, map: &[usize], k: usize) -> Result<(), SimViolation> {
    if !t.is_tree() {
        return Err(SimViolation::NotATree);
    }
    if map.len() != g.n {
        return Err(SimViolation::MapLength { n: g.n, got: map.len() });
    }
    if let Some(vertex) = map.iter().position(|&x| x >= t.n) {
        return Err(SimViolation::OutOfRange { vertex });
    }
    for &(u, v) in &g.edges {
        if map[u] != map[v] && !t.has_edge(map[u], map[v]) {
            return Err(SimViolation::NotHomomorphic { edge: (u, v) });
        }
    }
    let mut parts = vec![Vec::new(); t.n];
    for (v, &x) in map.iter().enumerate() {
        parts[x].push(v);
    }
    for (part, members) in parts.iter().enumerate() {
        if members.len() > k {
            return Err(SimViolation::TooLarge { part, size: members.len() });
        }
        if !members.is_empty() && !g.connected_within(members) {
            return Err(SimViolation::Disconnected { part });
        }
    }
    Ok(())
}

pub fn is_k_simulation(g: &Graph, sim: &TreeSimulation) -> bool {
    verify_k_simulation(g, &sim.tree, &sim.map, sim.k).is_ok()
}

/// Quotient of `g` by `map` onto `parts` vertices, without self loops.
pub fn quotient(g: &Graph, map: &[usize], parts: usize) -> Graph {
    let edges: Vec<_> = g.edges.iter().map(|&(u, v)| (map[u], map[v])).filter(|(a, b)| a != b).collect();
    Graph::new(parts, &edges).expect("quotient of a valid map")
}

/// Splits a connected graph into a BFS ball of `⌈n/2⌉` vertices around 0
/// (part 0) and the components of the rest. Every component touches the
/// ball and no other component, so the quotient is a star.
pub fn decompose_half(g: &Graph) -> Result<TreeSimulation, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let n = g.n;
    let half = n.div_ceil(2);
    let adj = g.adjacency();
    const NONE: usize = usize::MAX;
    let mut map = vec![NONE; n];
    let mut queue = VecDeque::from([0]);
    let mut taken = 0;
    let mut queued = vec![false; n];
    queued[0] = true;
    while let Some(u) = queue.pop_front() {
        if taken == half {
            break;
        }
        map[u] = 0;
        taken += 1;
        for &w in &adj[u] {
            if !queued[w] {
                queued[w] = true;
                queue.push_back(w);
            }
        }
    }
    let mut parts = 1;
    for s in 0..n {
        if map[s] != NONE {
            continue;
        }
        map[s] = parts;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if map[w] == NONE {
                    map[w] = parts;
                    stack.push(w);
                }
            }
        }
        parts += 1;
    }
    let tree = quotient(g, &map, parts);
    if !tree.is_acyclic() || !tree.is_connected() {
        return Err(GraphError::NotATree);
    }
    Ok(TreeSimulation { tree, map, k: half })
}

/// Every labelled connected graph on `n` vertices, `n ≤ 8`.
pub fn connected_graphs(n: usize) -> impl Iterator<Item = Graph> {
    assert!((1..=8).contains(&n), "exhaustive enumeration only up to 8 vertices");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let m = pairs.len();
    (0u64..1 << m).filter_map(move |bits| {
        let edges = (0..m).filter(|i| bits >> i & 1 == 1).map(|i| pairs[i]).collect();
        let g = Graph { n, edges };
        g.is_connected().then_some(g)
    })
}

/// Random spanning tree (random attachment) plus each other pair with probability `p`.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((order[rng.gen_range(0..i)], order[i]));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges).expect("generated edges are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_examples() {
        let p4 = Graph::path(4);
        assert_eq!(verify_k_simulation(&p4, &Graph::path(2), &[0, 0, 1, 1], 2), Ok(()));
        let k4 = Graph::complete(4);
        assert_eq!(
            verify_k_simulation(&k4, &Graph::star(4), &[0, 1, 2, 3], 1),
            Err(SimViolation::NotHomomorphic { edge: (1, 2) })
        );
        let t = Graph::new(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        assert_eq!(verify_k_simulation(&t, &t, &[0, 1, 2, 3, 4], 1), Ok(()));
        assert_eq!(
            verify_k_simulation(&p4, &Graph::path(2), &[0, 1, 1, 0], 2),
            Err(SimViolation::Disconnected { part: 0 })
        );
        assert_eq!(verify_k_simulation(&p4, &Graph::path(2), &[0, 0, 0, 1], 2), Err(SimViolation::TooLarge { part: 0, size: 3 }));
    }

    #[test]
    fn decompose_examples() {
        let one = decompose_half(&Graph { n: 1, edges: vec![] }).unwrap();
        assert_eq!((one.tree.n, one.map.clone(), one.k), (1, vec![0], 1));
        let p4 = decompose_half(&Graph::path(4)).unwrap();
        assert_eq!(p4.map, vec![0, 0, 1, 1]);
        assert_eq!(p4.tree.edges, vec![(0, 1)]);
        assert_eq!(decompose_half(&Graph { n: 3, edges: vec![(0, 1)] }), Err(GraphError::Disconnected));
    }

    #[test]
    fn connected_counts() {
        // labelled connected graphs: 1, 1, 4, 38, 728
        let counts: Vec<usize> = (1..=5).map(|n| connected_graphs(n).count()).collect();
        assert_eq!(counts, vec![1, 1, 4, 38, 728]);
    }
}
