//! Honest strategies.

mod alead;
mod basic;
mod phase;
pub mod prf;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use alead::ALead;
pub use basic::BasicLead;
pub use phase::{OutputRule, PhaseLead};
pub use prf::f_eval;

use crate::ring::{ProcessorId, Strategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolKind {
    #[serde(rename = "basic")]
    Basic,
    #[serde(rename = "alead")]
    ALead,
    #[serde(rename = "phase")]
    Phase,
    #[serde(rename = "phase-sum")]
    PhaseSum,
}

impl ProtocolKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::Basic => "basic",
            ProtocolKind::ALead => "alead",
            ProtocolKind::Phase => "phase",
            ProtocolKind::PhaseSum => "phase-sum",
        }
    }

    pub fn is_phase(&self) -> bool {
        matches!(self, ProtocolKind::Phase | ProtocolKind::PhaseSum)
    }

    /// Messages each honest processor sends in an honest run.
    pub fn messages_per_processor(&self, n: usize) -> usize {
        if self.is_phase() {
            2 * n
        } else {
            n
        }
    }

    /// Who wakes spontaneously.
    pub fn wakers(&self, n: usize, origin: ProcessorId) -> Vec<ProcessorId> {
        match self {
            ProtocolKind::Basic => (0..n).collect(),
            _ => vec![origin],
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "basic" => Ok(ProtocolKind::Basic),
            "alead" => Ok(ProtocolKind::ALead),
            "phase" => Ok(ProtocolKind::Phase),
            "phase-sum" => Ok(ProtocolKind::PhaseSum),
            other => Err(format!("unknown protocol `{other}` (expected basic|alead|phase|phase-sum)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretInput {
    pub d: u64,
    pub v: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseParams {
    pub l: usize,
    pub m: u64,
    pub fseed: u64,
}

impl PhaseParams {
    /// `l = ⌈10√n⌉`, `m = 2n²`. For small rings `l` is clamped to `n − 1`.
    pub fn defaults(n: usize, fseed: u64) -> Self {
        let l = (10.0 * (n as f64).sqrt()).ceil() as usize;
        PhaseParams { l: l.clamp(1, n.saturating_sub(1).max(1)), m: 2 * (n as u64) * (n as u64), fseed }
    }

    pub fn check(&self, n: usize) -> Result<(), String> {
        if self.l < 1 || self.l >= n {
            return Err(format!("l = {} must satisfy 1 ≤ l < n = {n}", self.l));
        }
        if self.m < 2 {
            return Err(format!("m = {} must be at least 2", self.m));
        }
        Ok(())
    }
}

/// Uniform secrets: `d ∈ [0, n)`, `v ∈ [0, m)`.
pub fn draw_inputs<R: Rng + ?Sized>(n: usize, m: u64, rng: &mut R) -> Vec<SecretInput> {
    (0..n)
        .map(|_| SecretInput { d: rng.gen_range(0..n as u64), v: rng.gen_range(0..m.max(1)) })
        .collect()
}

/// Honest strategy for one processor.
pub fn honest_strategy(
    kind: ProtocolKind,
    id: ProcessorId,
    n: usize,
    origin: ProcessorId,
    input: SecretInput,
    params: &PhaseParams,
) -> Box<dyn Strategy> {
    match kind {
        ProtocolKind::Basic => Box::new(BasicLead::new(n, input.d)),
        ProtocolKind::ALead => Box::new(ALead::new(n, input.d, id == origin)),
        ProtocolKind::Phase => Box::new(PhaseLead::new(
            id,
            n,
            params.m,
            input.d,
            input.v,
            OutputRule::Random { fseed: params.fseed, l: params.l },
        )),
        ProtocolKind::PhaseSum => Box::new(PhaseLead::new(id, n, params.m, input.d, input.v, OutputRule::Sum)),
    }
}

pub fn honest_strategies(
    kind: ProtocolKind,
    n: usize,
    origin: ProcessorId,
    inputs: &[SecretInput],
    params: &PhaseParams,
) -> Vec<Box<dyn Strategy>> {
    (0..n).map(|i| honest_strategy(kind, i, n, origin, inputs[i], params)).collect()
}

/// Inputs with only `d` set.
pub fn data_inputs(d: &[u64]) -> Vec<SecretInput> {
    d.iter().map(|&d| SecretInput { d, v: 0 }).collect()
}
