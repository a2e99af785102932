//! Protocol builders and the exhaustive small two-party family.

use super::game::{Node, ProtocolTree};
use super::graph::Graph;

fn two_party(inputs: [usize; 2], nodes: Vec<Node>) -> ProtocolTree {
    ProtocolTree { parties: 2, inputs: inputs.to_vec(), network: vec![(0, 1)], alphabet: 2, root: 0, nodes }
}

/// No messages, fixed output.
pub fn constant(bit: u8) -> ProtocolTree {
    two_party([1, 1], vec![Node::Leaf { output: bit }])
}

/// A sends its input bit, which is the outcome.
pub fn dictator() -> ProtocolTree {
    two_party(
        [2, 1],
        vec![
            Node::Move { sender: 0, receiver: 1, rule: vec![0, 1], children: vec![1, 2] },
            Node::Leaf { output: 0 },
            Node::Leaf { output: 1 },
        ],
    )
}

/// A sends its bit, then B sends its bit; the outcome is the XOR.
pub fn xor() -> ProtocolTree {
    let leaf = |o| Node::Leaf { output: o };
    two_party(
        [2, 2],
        vec![
            Node::Move { sender: 0, receiver: 1, rule: vec![0, 1], children: vec![1, 2] },
            Node::Move { sender: 1, receiver: 0, rule: vec![0, 1], children: vec![3, 4] },
            Node::Move { sender: 1, receiver: 0, rule: vec![0, 1], children: vec![5, 6] },
            leaf(0),
            leaf(1),
            leaf(1),
            leaf(0),
        ],
    )
}

/// A parity token walked along a DFS tour of a spanning tree of `g` from
/// vertex 0. Each processor adds its input bit on its first send; the tour's
/// final parity is the outcome. Size is `2^(2n−1)` nodes.
pub fn parity_walk(g: &Graph) -> ProtocolTree {
    assert!(g.n >= 2 && g.n <= 9 && g.is_connected(), "parity walk needs a small connected graph");
    let adj = g.adjacency();
    let mut walk = Vec::new();
    let mut seen = vec![false; g.n];
    fn dfs(u: usize, adj: &[Vec<usize>], seen: &mut [bool], walk: &mut Vec<(usize, usize)>) {
        seen[u] = true;
        for &w in &adj[u] {
            if !seen[w] {
                walk.push((u, w));
                dfs(w, adj, seen, walk);
                walk.push((w, u));
            }
        }
    }
    dfs(0, &adj, &mut seen, &mut walk);
    let mut first = vec![usize::MAX; g.n];
    for (i, &(u, _)) in walk.iter().enumerate() {
        if first[u] == usize::MAX {
            first[u] = i;
        }
    }
    let mut nodes = Vec::new();
    fn build(step: usize, parity: u8, walk: &[(usize, usize)], first: &[usize], nodes: &mut Vec<Node>) -> usize {
        let id = nodes.len();
        if step == walk.len() {
            nodes.push(Node::Leaf { output: parity });
            return id;
        }
        nodes.push(Node::Leaf { output: 0 });
        let (u, v) = walk[step];
        let rule = if first[u] == step { vec![parity, parity ^ 1] } else { vec![parity, parity] };
        let children = (0..2).map(|m| build(step + 1, m, walk, first, nodes)).collect();
        nodes[id] = Node::Move { sender: u, receiver: v, rule, children };
        id
    }
    build(0, 0, &walk, &first, &mut nodes);
    ProtocolTree { parties: g.n, inputs: vec![2; g.n], network: g.edges.clone(), alphabet: 2, root: 0, nodes }
}

#[derive(Clone, Copy)]
enum Sub {
    Leaf(u8),
    /// sender, identity rule?, children
    Move(usize, bool, u32, u32),
}

/// Visits every two-party protocol with binary messages and depth at most
/// `depth`, up to swapping a move's children. A party with two inputs sends
/// either a constant 0 or its input; a party with one input sends 0.
/// Returns the number visited.
pub fn for_each_two_party(depth: usize, inputs: [usize; 2], mut f: impl FnMut(&ProtocolTree)) -> u64 {
    assert!(inputs.iter().all(|&s| s == 1 || s == 2));
    let kinds: Vec<(usize, bool)> = (0..2)
        .flat_map(|s| if inputs[s] == 2 { vec![(s, false), (s, true)] } else { vec![(s, false)] })
        .collect();
    let mut arena = vec![Sub::Leaf(0), Sub::Leaf(1)];
    let mut level: Vec<u32> = vec![0, 1];
    for _ in 1..depth {
        let mut next = vec![0, 1];
        for &(s, id) in &kinds {
            for &x in &level {
                for &y in &level {
                    next.push(arena.len() as u32);
                    arena.push(Sub::Move(s, id, x, y));
                }
            }
        }
        level = next;
    }
    let mut p = two_party(inputs, Vec::with_capacity(32));
    let mut count = 0;
    let mut visit = |root: Sub, p: &mut ProtocolTree| {
        p.nodes.clear();
        emit(root, &arena, &inputs, &mut p.nodes);
        f(p);
        count += 1;
    };
    visit(Sub::Leaf(0), &mut p);
    visit(Sub::Leaf(1), &mut p);
    if depth > 0 {
        for &(s, id) in &kinds {
            for &x in &level {
                for &y in &level {
                    visit(Sub::Move(s, id, x, y), &mut p);
                }
            }
        }
    }
    count
}

fn emit(sub: Sub, arena: &[Sub], inputs: &[usize; 2], nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    match sub {
        Sub::Leaf(o) => nodes.push(Node::Leaf { output: o }),
        Sub::Move(s, identity, x, y) => {
            nodes.push(Node::Leaf { output: 0 });
            let a = emit(arena[x as usize], arena, inputs, nodes);
            let b = emit(arena[y as usize], arena, inputs, nodes);
            let rule = if identity { vec![0, 1] } else { vec![0; inputs[s]] };
            nodes[id] = Node::Move { sender: s, receiver: 1 - s, rule, children: vec![a, b] };
        }
    }
    id
}

/// `T(d) = 2 + r·T(d−1)²` with `r` move kinds.
pub fn family_size(depth: usize, inputs: [usize; 2]) -> u64 {
    let r: u64 = inputs.iter().map(|&s| s as u64).sum();
    (0..depth).fold(2, |t, _| 2 + r * t * t)
}
