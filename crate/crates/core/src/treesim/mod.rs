//! k-simulated trees and assure search over finite coin-toss protocols.
//!
//! Protocols are explicit game trees ([`ProtocolTree`], JSON with
//! `"kind": "leaf" | "move"` nodes). A deviating coalition may send any
//! symbol of the alphabet at its own decision nodes; honest parties follow
//! their rules on an unknown input. Waiting forever or stopping early would
//! leave the honest side without an output, so it never helps force a bit
//! and the search does not consider it.

mod family;
mod game;
mod graph;

pub use family::{constant, dictator, family_size, for_each_two_party, parity_walk, xor};
pub use game::{
    assure, assure_search_two_party, assures, coalition_via_tree, replay, tree_assure_search, two_side_holds,
    Deviation, Node, ProtocolError, ProtocolTree, ReplayFailure, SimulatedCoalition, TreeAssurance, MAX_INPUTS,
};
pub use graph::{
    connected_graphs, decompose_half, is_k_simulation, quotient, random_connected_graph, verify_k_simulation, Graph,
    GraphError, SimViolation, TreeSimulation,
};
