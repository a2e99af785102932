//! Validity of A-LEAD^uni executions, checked from the transcript alone, and
//! the dependency graphs used to reason about PhaseAsyncLead runs.
//!
//! An execution elects `s` exactly when
//! 1. every exposed adversary sent at least `n` messages,
//! 2. the first `n` messages of every exposed adversary sum to the same `s` mod `n`,
//! 3. the last `l_j` of those `n` messages are the secrets of the segment `I_j`,
//!    the one furthest down the ring first.
//!
//! An adversary is exposed when an honest processor follows it.

pub mod fuzz;
pub mod graphs;

use serde::Serialize;
use thiserror::Error;

use crate::attacks::segments;
use crate::ring::{Channel, EventKind, ProcessorId, Transcript};

pub use graphs::{build_graphs, is_validated, reachable, DependencyGraphs, EventRef, Validation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("transcript has validation-channel traffic; not an A-LEAD execution")]
    NotALead,
    #[error("transcript is for n = {got}, expected {expected}")]
    RingSize { expected: usize, got: usize },
    #[error("coalition member {0} outside the ring")]
    Coalition(ProcessorId),
    #[error("malformed transcript: {0}")]
    Malformed(String),
    #[error("unknown event {0:?}")]
    UnknownEvent(EventRef),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    /// An exposed adversary that sent too few messages.
    Adversary(ProcessorId),
    /// Two exposed adversaries whose sums differ.
    Pair(ProcessorId, ProcessorId),
    /// An honest processor whose secret was not replayed.
    Honest(ProcessorId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Valid(u64),
    Invalid { condition: u8, witness: Witness },
}

impl Verdict {
    pub fn elected(&self) -> Option<u64> {
        match self {
            Verdict::Valid(s) => Some(*s),
            Verdict::Invalid { .. } => None,
        }
    }
}

/// Decide from a transcript whether an A-LEAD^uni execution elects someone.
///
/// Honest secrets are read off each honest processor's first message.
pub fn validate_execution(t: &Transcript, coalition: &[ProcessorId], n: usize) -> Result<Verdict, OracleError> {
    if t.n != n {
        return Err(OracleError::RingSize { expected: n, got: t.n });
    }
    if let Some(&p) = coalition.iter().find(|&&p| p >= n) {
        return Err(OracleError::Coalition(p));
    }
    let nn = n as u64;
    let mut sends: Vec<Vec<u64>> = vec![Vec::new(); n];
    for e in &t.events {
        if e.channel != Channel::Data {
            return Err(OracleError::NotALead);
        }
        if e.proc >= n {
            return Err(OracleError::Malformed(format!("processor {} outside ring", e.proc)));
        }
        if e.kind == EventKind::Send {
            sends[e.proc].push(e.value % nn);
        }
    }
    if coalition.is_empty() {
        let mut total = 0;
        for (p, s) in sends.iter().enumerate() {
            let Some(&d) = s.first() else {
                return Err(OracleError::Malformed(format!("honest processor {p} never sent")));
            };
            total = (total + d) % nn;
        }
        return Ok(Verdict::Valid(total));
    }
    let exposed: Vec<_> = segments(n, coalition).into_iter().filter(|s| !s.is_empty()).collect();
    if exposed.is_empty() {
        return Err(OracleError::Malformed("no honest processor".into()));
    }
    for s in &exposed {
        if sends[s.adversary].len() < n {
            return Ok(Verdict::Invalid { condition: 1, witness: Witness::Adversary(s.adversary) });
        }
    }
    for s in &exposed {
        let out = &sends[s.adversary][..n];
        for (t_idx, &h) in s.members.iter().enumerate() {
            let secret = sends[h].first().copied();
            if secret != Some(out[n - 1 - t_idx]) {
                return Ok(Verdict::Invalid { condition: 3, witness: Witness::Honest(h) });
            }
        }
    }
    let sum = |a: ProcessorId| sends[a][..n].iter().fold(0, |acc, &x| (acc + x) % nn);
    let first = exposed[0].adversary;
    let s0 = sum(first);
    for s in &exposed[1..] {
        if sum(s.adversary) != s0 {
            return Ok(Verdict::Invalid { condition: 2, witness: Witness::Pair(first, s.adversary) });
        }
    }
    Ok(Verdict::Valid(s0))
}
