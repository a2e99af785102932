//! Fair leader election on asynchronous unidirectional rings with colluding
//! rational agents: honest protocols, concrete attacks, a validity oracle for
//! A-LEAD^uni executions, dependency graphs, reductions between election and
//! coin tossing, and the symbolic tree-network constructions.
//!
//! Start with [`harness::run_trials`] or with the runnable programs in
//! `examples/`.

pub mod attacks;
pub mod harness;
pub mod oracle;
pub mod protocols;
pub mod reductions;
pub mod ring;
pub mod treesim;

pub use ring::{Outcome, ProcessorId, Strategy};
