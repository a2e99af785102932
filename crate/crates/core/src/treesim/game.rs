use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::graph::{verify_k_simulation, Graph, SimViolation, TreeSimulation};

/// Input sets are tracked as bitmasks, so a (merged) party has at most this many inputs.
pub const MAX_INPUTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Leaf { output: u8 },
    /// `sender` sends `rule[input]` to `receiver`; the protocol continues at `children[msg]`.
    Move { sender: usize, receiver: usize, rule: Vec<u8>, children: Vec<usize> },
}

/// Finite coin-toss protocol in extensive form. Node ids index `nodes`; a
/// node is reached by exactly one history, so per-node choices are
/// history-dependent strategies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolTree {
    pub parties: usize,
    /// Size of each party's input set.
    pub inputs: Vec<usize>,
    pub network: Vec<(usize, usize)>,
    pub alphabet: usize,
    pub root: usize,
    pub nodes: Vec<Node>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("malformed protocol: {0}")]
    Malformed(String),
    #[error("node {0} is reachable from itself; the protocol is unbounded")]
    Unbounded(usize),
    #[error("node {0} has more than one parent")]
    Shared(usize),
    #[error("expected {expected} parties, got {got}")]
    Parties { expected: usize, got: usize },
    #[error("merged party has {0} inputs, more than {MAX_INPUTS}")]
    TooManyInputs(usize),
    #[error("network is not a tree")]
    NotATree,
    #[error("move {node} uses a link outside the network")]
    Link { node: usize },
    #[error(transparent)]
    Simulation(#[from] SimViolation),
    #[error("no processor assures any bit")]
    NoAssurer,
}

impl ProtocolTree {
    pub fn from_json(text: &str) -> Result<Self, ProtocolError> {
        let p: ProtocolTree = serde_json::from_str(text).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("protocol serializes")
    }

    pub fn network_graph(&self) -> Result<Graph, ProtocolError> {
        Graph::new(self.parties, &self.network).map_err(|e| ProtocolError::Malformed(e.to_string()))
    }

    /// Shape checks plus boundedness (no node reachable from itself) and
    /// one parent per reachable node. Returns the depth.
    pub fn validate(&self) -> Result<usize, ProtocolError> {
        let bad = |m: String| Err(ProtocolError::Malformed(m));
        if self.inputs.len() != self.parties || self.parties == 0 {
            return bad(format!("{} input sets for {} parties", self.inputs.len(), self.parties));
        }
        if let Some(&s) = self.inputs.iter().find(|&&s| s == 0 || s > MAX_INPUTS) {
            return bad(format!("input set of size {s}"));
        }
        if self.alphabet == 0 {
            return bad("empty alphabet".into());
        }
        let net = self.network_graph()?;
        if self.root >= self.nodes.len() {
            return bad("root out of range".into());
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Leaf { output } if *output > 1 => return bad(format!("leaf {i} outputs {output}")),
                Node::Leaf { .. } => {}
                Node::Move { sender, receiver, rule, children } => {
                    if *sender >= self.parties || *receiver >= self.parties {
                        return bad(format!("move {i} names a party out of range"));
                    }
                    if sender != receiver && !net.has_edge(*sender, *receiver) {
                        return Err(ProtocolError::Link { node: i });
                    }
                    if rule.len() != self.inputs[*sender] || rule.iter().any(|&m| m as usize >= self.alphabet) {
                        return bad(format!("move {i} has a bad rule"));
                    }
                    if children.len() != self.alphabet || children.iter().any(|&c| c >= self.nodes.len()) {
                        return bad(format!("move {i} has bad children"));
                    }
                }
            }
        }
        // iterative DFS with colours
        let mut state = vec![0u8; self.nodes.len()];
        let mut depth = 0;
        let mut stack = vec![(self.root, 0usize, 0usize)];
        state[self.root] = 1;
        while let Some(&mut (node, ref mut next, d)) = stack.last_mut() {
            depth = depth.max(d);
            let children: &[usize] = match &self.nodes[node] {
                Node::Leaf { .. } => &[],
                Node::Move { children, .. } => children,
            };
            if *next == children.len() {
                state[node] = 2;
                stack.pop();
                continue;
            }
            let c = children[*next];
            *next += 1;
            match state[c] {
                1 => return Err(ProtocolError::Unbounded(c)),
                2 => return Err(ProtocolError::Shared(c)),
                _ => {}
            }
            state[c] = 1;
            stack.push((c, 0, d + 1));
        }
        Ok(depth)
    }

    /// Merges parties into groups (a partition of `0..parties`, empty groups
    /// allowed). A merged party's input is the tuple of its members' inputs,
    /// first member least significant.
    pub fn merge(&self, groups: &[Vec<usize>], network: &[(usize, usize)]) -> Result<ProtocolTree, ProtocolError> {
        let mut group_of = vec![usize::MAX; self.parties];
        for (g, members) in groups.iter().enumerate() {
            for &x in members {
                if x >= self.parties || group_of[x] != usize::MAX {
                    return Err(ProtocolError::Malformed(format!("groups do not partition the parties at {x}")));
                }
                group_of[x] = g;
            }
        }
        if group_of.contains(&usize::MAX) {
            return Err(ProtocolError::Malformed("groups do not cover every party".into()));
        }
        let mut inputs = Vec::with_capacity(groups.len());
        let mut stride = vec![1usize; self.parties];
        for members in groups {
            let mut size = 1usize;
            for &x in members {
                stride[x] = size;
                size = size.saturating_mul(self.inputs[x]);
                if size > MAX_INPUTS {
                    return Err(ProtocolError::TooManyInputs(size));
                }
            }
            inputs.push(size);
        }
        let nodes = self
            .nodes
            .iter()
            .map(|node| match node {
                Node::Leaf { output } => Node::Leaf { output: *output },
                Node::Move { sender, receiver, rule, children } => {
                    let g = group_of[*sender];
                    let rule = (0..inputs[g]).map(|x| rule[x / stride[*sender] % self.inputs[*sender]]).collect();
                    Node::Move { sender: g, receiver: group_of[*receiver], rule, children: children.clone() }
                }
            })
            .collect();
        let merged = ProtocolTree {
            parties: groups.len(),
            inputs,
            network: network.to_vec(),
            alphabet: self.alphabet,
            root: self.root,
            nodes,
        };
        merged.validate()?;
        Ok(merged)
    }
}

/// A coalition's deviation: the message it sends at each of its decision
/// nodes reachable under the deviation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub coalition: Vec<usize>,
    pub bit: u8,
    pub moves: BTreeMap<usize, u8>,
}

const UNSET: u8 = u8::MAX;

struct Search<'a> {
    p: &'a ProtocolTree,
    deviant: Vec<bool>,
    bit: u8,
    moves: Vec<u8>,
    masks: Vec<u64>,
}

impl Search<'_> {
    /// AND-OR: the coalition picks one message, honest senders range over
    /// every message some still-consistent input produces.
    fn win(&mut self, node: usize) -> bool {
        match &self.p.nodes[node] {
            Node::Leaf { output } => *output == self.bit,
            Node::Move { sender, rule, children, .. } => {
                if self.deviant[*sender] {
                    for (m, &c) in children.iter().enumerate() {
                        if self.win(c) {
                            self.moves[node] = m as u8;
                            return true;
                        }
                    }
                    false
                } else {
                    let mask = self.masks[*sender];
                    for (m, &c) in children.iter().enumerate() {
                        let sub = preimage(mask, rule, m);
                        if sub == 0 {
                            continue;
                        }
                        self.masks[*sender] = sub;
                        let ok = self.win(c);
                        self.masks[*sender] = mask;
                        if !ok {
                            return false;
                        }
                    }
                    true
                }
            }
        }
    }

    fn collect(&mut self, node: usize, out: &mut BTreeMap<usize, u8>) {
        if let Node::Move { sender, rule, children, .. } = &self.p.nodes[node] {
            if self.deviant[*sender] {
                let m = self.moves[node];
                out.insert(node, m);
                self.collect(children[m as usize], out);
            } else {
                let mask = self.masks[*sender];
                for (m, &c) in children.iter().enumerate() {
                    let sub = preimage(mask, rule, m);
                    if sub != 0 {
                        self.masks[*sender] = sub;
                        self.collect(c, out);
                    }
                }
                self.masks[*sender] = mask;
            }
        }
    }
}

/// Inputs in `mask` whose rule sends `m`.
fn preimage(mask: u64, rule: &[u8], m: usize) -> u64 {
    let mut sub = 0u64;
    let mut rest = mask;
    while rest != 0 {
        let x = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if rule[x] as usize == m {
            sub |= 1 << x;
        }
    }
    sub
}

fn full_mask(size: usize) -> u64 {
    if size == 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    }
}

/// Does `coalition` assure `bit`? Returns the forcing deviation. The
/// protocol is assumed valid.
pub fn assure(p: &ProtocolTree, coalition: &[usize], bit: u8) -> Option<Deviation> {
    let mut deviant = vec![false; p.parties];
    for &x in coalition {
        deviant[x] = true;
    }
    let mut s = Search {
        p,
        deviant,
        bit,
        moves: vec![UNSET; p.nodes.len()],
        masks: p.inputs.iter().map(|&k| full_mask(k)).collect(),
    };
    if !s.win(p.root) {
        return None;
    }
    let mut moves = BTreeMap::new();
    s.collect(p.root, &mut moves);
    let mut coalition = coalition.to_vec();
    coalition.sort_unstable();
    Some(Deviation { coalition, bit, moves })
}

/// Honest input profile on which a replayed deviation misses its bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayFailure {
    pub profile: Vec<usize>,
    /// `None` when the deviation has no move at a node it reached.
    pub output: Option<u8>,
}

/// Plays `dev` against every honest input profile.
pub fn replay(p: &ProtocolTree, dev: &Deviation) -> Result<(), ReplayFailure> {
    let honest: Vec<usize> = (0..p.parties).filter(|x| !dev.coalition.contains(x)).collect();
    let mut profile = vec![0usize; p.parties];
    loop {
        let mut node = p.root;
        let output = loop {
            match &p.nodes[node] {
                Node::Leaf { output } => break Some(*output),
                Node::Move { sender, rule, children, .. } => {
                    let m = if dev.coalition.contains(sender) {
                        match dev.moves.get(&node) {
                            Some(&m) => m,
                            None => break None,
                        }
                    } else {
                        rule[profile[*sender]]
                    };
                    node = children[m as usize];
                }
            }
        };
        if output != Some(dev.bit) {
            return Err(ReplayFailure { profile, output });
        }
        // odometer over honest inputs
        let mut i = 0;
        loop {
            let Some(&x) = honest.get(i) else { return Ok(()) };
            profile[x] += 1;
            if profile[x] < p.inputs[x] {
                break;
            }
            profile[x] = 0;
            i += 1;
        }
    }
}

/// Every `(party, bit)` a single party assures in a two-party protocol.
pub fn assure_search_two_party(p: &ProtocolTree) -> Result<Vec<Deviation>, ProtocolError> {
    if p.parties != 2 {
        return Err(ProtocolError::Parties { expected: 2, got: p.parties });
    }
    p.validate()?;
    Ok(assure_set_unchecked(p))
}

pub(crate) fn assure_set_unchecked(p: &ProtocolTree) -> Vec<Deviation> {
    let mut out = Vec::new();
    for party in 0..2 {
        for bit in 0..2 {
            out.extend(assure(p, &[party], bit));
        }
    }
    out
}

pub fn assures(set: &[Deviation], party: usize, bit: u8) -> bool {
    set.iter().any(|d| d.coalition == [party] && d.bit == bit)
}

/// `(A assures 0 ∨ B assures 1) ∧ (A assures 1 ∨ B assures 0)`.
pub fn two_side_holds(set: &[Deviation]) -> bool {
    (assures(set, 0, 0) || assures(set, 1, 1)) && (assures(set, 0, 1) || assures(set, 1, 0))
}

/// Result of the leaf-folding search on a tree network.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeAssurance {
    pub processor: usize,
    pub bit: u8,
    pub deviation: Deviation,
    /// `(leaf, neighbour)` folds performed, in the numbering of each level.
    pub folds: Vec<(usize, usize)>,
    /// Levels where the folded candidate failed and every processor was tried.
    pub fallbacks: usize,
}

/// Peel a leaf `a` with neighbour `b`: if `a` assures a bit, done. Otherwise
/// let `b` simulate `a` and recurse; the processor found there is checked
/// (and its deviation recomputed) in the unfolded protocol.
pub fn tree_assure_search(p: &ProtocolTree) -> Result<TreeAssurance, ProtocolError> {
    p.validate()?;
    if !p.network_graph()?.is_tree() {
        return Err(ProtocolError::NotATree);
    }
    let mut folds = Vec::new();
    let mut fallbacks = 0;
    let (processor, deviation) = fold_search(p, &mut folds, &mut fallbacks)?;
    Ok(TreeAssurance { processor, bit: deviation.bit, deviation, folds, fallbacks })
}

fn single(p: &ProtocolTree, x: usize) -> Option<Deviation> {
    assure(p, &[x], 1).or_else(|| assure(p, &[x], 0))
}

fn fold_search(
    p: &ProtocolTree,
    folds: &mut Vec<(usize, usize)>,
    fallbacks: &mut usize,
) -> Result<(usize, Deviation), ProtocolError> {
    if p.parties == 1 {
        return single(p, 0).map(|d| (0, d)).ok_or(ProtocolError::NoAssurer);
    }
    let net = p.network_graph()?;
    let adj = net.adjacency();
    let a = (0..p.parties).find(|&x| adj[x].len() == 1).ok_or(ProtocolError::NotATree)?;
    let b = adj[a][0];
    if let Some(d) = single(p, a) {
        return Ok((a, d));
    }
    folds.push((a, b));
    // parties other than a keep their order; b absorbs a
    let keep: Vec<usize> = (0..p.parties).filter(|&x| x != a).collect();
    let index = |x: usize| if x > a { x - 1 } else { x };
    let groups: Vec<Vec<usize>> = keep.iter().map(|&x| if x == b { vec![b, a] } else { vec![x] }).collect();
    let network: Vec<(usize, usize)> =
        net.edges.iter().filter(|&&(u, v)| u != a && v != a).map(|&(u, v)| (index(u), index(v))).collect();
    let folded = p.merge(&groups, &network)?;
    let (c, d) = fold_search(&folded, folds, fallbacks)?;
    let c = keep[c];
    if let Some(dev) = assure(p, &[c], d.bit) {
        return Ok((c, dev));
    }
    *fallbacks += 1;
    (0..p.parties).find_map(|x| single(p, x).map(|d| (x, d))).ok_or(ProtocolError::NoAssurer)
}

/// A coalition found through a tree simulation of the protocol's network.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimulatedCoalition {
    pub tree_vertex: usize,
    pub deviation: Deviation,
}

/// Simulate `p` on `sim.tree` (each tree vertex runs its fiber), find a tree
/// processor that assures a bit, and return its fiber as a coalition of `p`
/// together with a deviation forcing that bit in `p` itself.
pub fn coalition_via_tree(p: &ProtocolTree, sim: &TreeSimulation) -> Result<SimulatedCoalition, ProtocolError> {
    p.validate()?;
    verify_k_simulation(&p.network_graph()?, &sim.tree, &sim.map, sim.k)?;
    let merged = p.merge(&sim.parts(), &sim.tree.edges)?;
    let found = tree_assure_search(&merged)?;
    let members = sim.fiber(found.processor);
    let deviation = assure(p, &members, found.bit).ok_or(ProtocolError::NoAssurer)?;
    Ok(SimulatedCoalition { tree_vertex: found.processor, deviation })
}
