//! Coalition strategies, each parameterized by a target leader `w`.
//!
//! Attack code never decides where adversaries sit; [`resolve_placement`]
//! does, so the same strategies run under worst-case and random placement.

mod alead;
mod phase;
pub mod slots;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use alead::{BasicSingle, Cubic, Naive, Randomized};
pub use phase::{Rushing, SumAbuse};
pub use slots::{SlotAdversary, SlotPlan, View};

use crate::protocols::{honest_strategy, PhaseParams, ProtocolKind, SecretInput};
use crate::ring::{ProcessorId, Strategy};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttackError {
    #[error("attack precondition violated: {0}")]
    Precondition(String),
    #[error("bad placement: {0}")]
    Placement(String),
    #[error("attack `{attack}` targets {expected}, not {got}")]
    Protocol { attack: &'static str, expected: ProtocolKind, got: ProtocolKind },
    #[error("no cubic schedule for k = {k}, n = {n}: need (k−1)k(k+1)/2 ≥ n − k, roughly k ≥ 2∛n ≈ {bound:.1}")]
    Infeasible { k: usize, n: usize, bound: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    Single,
    Naive,
    Cubic,
    Random,
    SumAbuse,
    PhaseRush,
}

impl AttackKind {
    pub fn name(&self) -> &'static str {
        match self {
            AttackKind::Single => "single",
            AttackKind::Naive => "naive",
            AttackKind::Cubic => "cubic",
            AttackKind::Random => "random",
            AttackKind::SumAbuse => "sum-abuse",
            AttackKind::PhaseRush => "phase-rush",
        }
    }

    /// The protocol this attack is written against.
    pub fn protocol(&self) -> ProtocolKind {
        match self {
            AttackKind::Single => ProtocolKind::Basic,
            AttackKind::Naive | AttackKind::Cubic | AttackKind::Random => ProtocolKind::ALead,
            AttackKind::SumAbuse => ProtocolKind::PhaseSum,
            AttackKind::PhaseRush => ProtocolKind::Phase,
        }
    }

    /// Whether the attack should win on every run once its preconditions hold.
    pub fn deterministic(&self) -> bool {
        !matches!(self, AttackKind::Random | AttackKind::PhaseRush)
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "single" => AttackKind::Single,
            "naive" => AttackKind::Naive,
            "cubic" => AttackKind::Cubic,
            "random" => AttackKind::Random,
            "sum-abuse" => AttackKind::SumAbuse,
            "phase-rush" => AttackKind::PhaseRush,
            other => {
                return Err(format!(
                    "unknown attack `{other}` (expected single|naive|cubic|random|sum-abuse|phase-rush)"
                ))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    Explicit(Vec<ProcessorId>),
    EqualSpacing { k: usize, offset: usize },
    CubicSchedule { k: usize },
    Bernoulli { p: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub w: u64,
    /// `None` picks the attack's natural placement.
    pub placement: Option<Placement>,
    /// Coalition size for placement rules that need one.
    pub k: Option<usize>,
    /// Circularity window of the randomized attack.
    pub c: usize,
}

impl AttackSpec {
    pub fn new(kind: AttackKind, w: u64) -> Self {
        AttackSpec { kind, w, placement: None, k: None, c: 3 }
    }

    pub fn at(mut self, positions: &[ProcessorId]) -> Self {
        self.placement = Some(Placement::Explicit(positions.to_vec()));
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_placement(mut self, p: Placement) -> Self {
        self.placement = Some(p);
        self
    }

    pub fn with_c(mut self, c: usize) -> Self {
        self.c = c;
        self
    }
}

/// Maximal run of honest processors that follows adversary `adversary`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub adversary: ProcessorId,
    pub members: Vec<ProcessorId>,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Honest segments in ring order, one per adversary (possibly empty).
pub fn segments(n: usize, coalition: &[ProcessorId]) -> Vec<Segment> {
    let mut mask = vec![false; n];
    for &a in coalition {
        mask[a] = true;
    }
    let mut sorted = coalition.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted
        .iter()
        .map(|&a| Segment {
            adversary: a,
            members: (1..n).map(|d| (a + d) % n).take_while(|&p| !mask[p]).collect(),
        })
        .collect()
}

/// Segment lengths for the cubic attack, in coalition order `a_1 … a_k`.
///
/// Gives `l_i = (k+1−i)(k−1)` when `n = k + (k−1)k(k+1)/2`. Otherwise it caps
/// each `l_i` at that value and at a common level `t`, choosing the smallest
/// `t` that reaches `n − k` and trimming the surplus from the back. The result
/// is non-increasing, has `l_k ≤ k−1` and `l_i ≤ l_{i+1} + k − 1`.
pub fn cubic_distances(k: usize, n: usize) -> Result<Vec<usize>, AttackError> {
    let infeasible = || AttackError::Infeasible { k, n, bound: 2.0 * (n as f64).cbrt() };
    if k < 2 || n <= k + 1 {
        return Err(infeasible());
    }
    let caps: Vec<usize> = (1..=k).map(|i| (k + 1 - i) * (k - 1)).collect();
    let need = n - k;
    let total = |t: usize| caps.iter().map(|&c| c.min(t)).sum::<usize>();
    if total(usize::MAX) < need {
        return Err(infeasible());
    }
    let mut t = 0;
    while total(t) < need {
        t += 1;
    }
    let mut l: Vec<usize> = caps.iter().map(|&c| c.min(t)).collect();
    let mut excess = total(t) - need;
    for x in l.iter_mut().rev() {
        if excess == 0 {
            break;
        }
        if *x == t {
            *x -= 1;
            excess -= 1;
        }
    }
    if l[0] + k >= n {
        return Err(AttackError::Precondition(format!(
            "cubic schedule {l:?} leaves no transfer phase for n = {n}"
        )));
    }
    Ok(l)
}

/// Placement used by the rushing attack: `k` adversaries evenly spread, one of
/// them at processor `n − l − 1`, the validator of round `n − l`.
pub fn rushing_positions(n: usize, k: usize, l: usize) -> Vec<ProcessorId> {
    let anchor = n - l - 1;
    let mut v: Vec<usize> = (0..k).map(|i| (anchor + i * n / k) % n).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn default_k(spec: &AttackSpec, n: usize) -> usize {
    spec.k.unwrap_or_else(|| match spec.kind {
        AttackKind::Single => 1,
        AttackKind::SumAbuse => 4,
        AttackKind::Cubic => (2.0 * (n as f64).cbrt()).ceil() as usize,
        _ => ((n as f64).sqrt().ceil() as usize + 3).min(n - 1),
    })
}

/// Adversary positions for `spec` on a ring of `n`.
pub fn resolve_placement<R: Rng + ?Sized>(
    spec: &AttackSpec,
    n: usize,
    params: &PhaseParams,
    rng: &mut R,
) -> Result<Vec<ProcessorId>, AttackError> {
    let k = default_k(spec, n);
    let placement = spec.placement.clone().unwrap_or_else(|| match spec.kind {
        AttackKind::Single => Placement::Explicit(vec![0]),
        AttackKind::Naive | AttackKind::SumAbuse => Placement::EqualSpacing { k, offset: 0 },
        AttackKind::Cubic => Placement::CubicSchedule { k },
        AttackKind::Random => Placement::Bernoulli { p: (8.0 * (n as f64).ln() / n as f64).sqrt().min(1.0) },
        AttackKind::PhaseRush => Placement::Explicit(rushing_positions(n, k, params.l)),
    });
    let mut pos = match placement {
        Placement::Explicit(v) => v,
        Placement::EqualSpacing { k, offset } => {
            if k == 0 || k > n {
                return Err(AttackError::Placement(format!("cannot space {k} adversaries on {n}")));
            }
            (0..k).map(|i| (offset + i * n / k) % n).collect()
        }
        Placement::CubicSchedule { k } => {
            let l = cubic_distances(k, n)?;
            let mut at = 0;
            let mut v = Vec::with_capacity(k);
            for li in l {
                v.push(at);
                at += li + 1;
            }
            v
        }
        Placement::Bernoulli { p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(AttackError::Placement(format!("probability {p} outside [0, 1]")));
            }
            (0..n).filter(|_| rng.gen_bool(p)).collect()
        }
    };
    if let Some(&bad) = pos.iter().find(|&&p| p >= n) {
        return Err(AttackError::Placement(format!("position {bad} outside ring of size {n}")));
    }
    let before = pos.len();
    pos.sort_unstable();
    pos.dedup();
    if pos.len() != before {
        return Err(AttackError::Placement("duplicate position".into()));
    }
    Ok(pos)
}

/// A ring ready to simulate: honest code everywhere except on `coalition`.
pub struct Deployment {
    /// Processors running deviating code.
    pub coalition: Vec<ProcessorId>,
    /// Every processor the placement drew, including any that had to run honestly.
    pub drawn: Vec<ProcessorId>,
    pub origin: ProcessorId,
    pub strategies: Vec<Box<dyn Strategy>>,
    pub wakers: Vec<ProcessorId>,
}

fn need_protocol(kind: AttackKind, got: ProtocolKind) -> Result<(), AttackError> {
    if kind.protocol() != got {
        return Err(AttackError::Protocol { attack: kind.name(), expected: kind.protocol(), got });
    }
    Ok(())
}

fn lowest_honest(n: usize, coalition: &[ProcessorId]) -> Result<ProcessorId, AttackError> {
    (0..n)
        .find(|p| !coalition.contains(p))
        .ok_or_else(|| AttackError::Precondition("no honest processor left".into()))
}

/// Coalition strategies against Basic-LEAD.
pub fn basic_single_attack(n: usize, coalition: &[ProcessorId], w: u64) -> Result<Vec<(ProcessorId, Box<dyn Strategy>)>, AttackError> {
    if coalition.len() != 1 {
        return Err(AttackError::Precondition(format!("single attack needs k = 1, got {}", coalition.len())));
    }
    Ok(vec![(coalition[0], Box::new(BasicSingle::new(n, w)))])
}

/// Naive attack. Refuses when a segment is longer than `k − 1`.
pub fn naive_attack(n: usize, coalition: &[ProcessorId], w: u64) -> Result<Vec<(ProcessorId, Box<dyn Strategy>)>, AttackError> {
    let k = coalition.len();
    let segs = segments(n, coalition);
    if k == 0 || k >= n {
        return Err(AttackError::Precondition(format!("need 1 ≤ k < n, got k = {k}")));
    }
    if let Some(s) = segs.iter().find(|s| s.len() + 1 > k) {
        return Err(AttackError::Precondition(format!(
            "segment after {} has length {} > k − 1 = {}",
            s.adversary,
            s.len(),
            k - 1
        )));
    }
    Ok(segs
        .iter()
        .map(|s| (s.adversary, Box::new(Naive::new(n, k, s.len(), w)) as Box<dyn Strategy>))
        .collect())
}

/// Cubic attack on the given positions; each adversary uses the length of
/// the honest segment it precedes.
pub fn cubic_attack(n: usize, coalition: &[ProcessorId], w: u64) -> Result<Vec<(ProcessorId, Box<dyn Strategy>)>, AttackError> {
    let k = coalition.len();
    if k == 0 || k >= n {
        return Err(AttackError::Precondition(format!("need 1 ≤ k < n, got k = {k}")));
    }
    let segs = segments(n, coalition);
    if let Some(s) = segs.iter().find(|s| k + s.len() >= n) {
        return Err(AttackError::Precondition(format!(
            "segment after {} leaves no transfer phase (n − k − l = 0)",
            s.adversary
        )));
    }
    Ok(segs
        .iter()
        .map(|s| (s.adversary, Box::new(Cubic::new(n, k, s.len(), w)) as Box<dyn Strategy>))
        .collect())
}

/// Randomized-location attack. Every adversary runs the same code.
pub fn randomized_attack(n: usize, coalition: &[ProcessorId], c: usize, w: u64) -> Vec<(ProcessorId, Box<dyn Strategy>)> {
    coalition.iter().map(|&a| (a, Box::new(Randomized::new(n, c, w)) as Box<dyn Strategy>)).collect()
}

/// Sum-variant abuse. Needs exactly `{0, L+1, 2(L+1), 3(L+1)}` with `L = (n−4)/4 ≥ 2`.
pub fn sum_abuse_attack(n: usize, coalition: &[ProcessorId], w: u64) -> Result<Vec<(ProcessorId, Box<dyn Strategy>)>, AttackError> {
    if n < 12 || (n - 4) % 4 != 0 {
        return Err(AttackError::Precondition(format!("L = (n − 4)/4 must be an integer ≥ 2, n = {n}")));
    }
    let step = (n - 4) / 4 + 1;
    let want: Vec<usize> = (0..4).map(|j| j * step).collect();
    let mut got = coalition.to_vec();
    got.sort_unstable();
    if got != want {
        return Err(AttackError::Precondition(format!("sum abuse needs adversaries at {want:?}, got {got:?}")));
    }
    Ok((0..4)
        .map(|j| (j * step, Box::new(SlotAdversary::new(n, w, SumAbuse::new(n, j, w))) as Box<dyn Strategy>))
        .collect())
}

/// Rushing attack against PhaseAsyncLead. Needs origin 0 honest and every
/// segment shorter than `k − 3`.
pub fn phase_rushing_attack(
    n: usize,
    coalition: &[ProcessorId],
    params: &PhaseParams,
    w: u64,
) -> Result<Vec<(ProcessorId, Box<dyn Strategy>)>, AttackError> {
    let k = coalition.len();
    if coalition.contains(&0) {
        return Err(AttackError::Precondition("rushing attack needs the origin (0) honest".into()));
    }
    if k < 4 {
        return Err(AttackError::Precondition(format!("rushing attack needs k ≥ 4, got {k}")));
    }
    let segs = segments(n, coalition);
    if let Some(s) = segs.iter().find(|s| s.len() + 3 >= k) {
        return Err(AttackError::Precondition(format!(
            "segment after {} has length {} ≥ k − 3 = {}",
            s.adversary,
            s.len(),
            k - 3
        )));
    }
    if let Some(s) = segs.iter().find(|s| s.len() > params.l) {
        return Err(AttackError::Precondition(format!(
            "segment after {} is longer than l = {}",
            s.adversary, params.l
        )));
    }
    Ok(coalition
        .iter()
        .map(|&a| {
            let plan = Rushing::new(n, k, params.l, params.m, params.fseed, w, coalition, a);
            (a, Box::new(SlotAdversary::new(n, w, plan)) as Box<dyn Strategy>)
        })
        .collect())
}

/// Place the coalition, pick the origin, and build every processor's strategy.
pub fn deploy<R: Rng + ?Sized>(
    spec: &AttackSpec,
    protocol: ProtocolKind,
    n: usize,
    params: &PhaseParams,
    inputs: &[SecretInput],
    rng: &mut R,
) -> Result<Deployment, AttackError> {
    need_protocol(spec.kind, protocol)?;
    if n < 2 {
        return Err(AttackError::Placement("ring needs n ≥ 2".into()));
    }
    if spec.w >= n as u64 {
        return Err(AttackError::Precondition(format!("target {} outside [0, {n})", spec.w)));
    }
    let drawn = resolve_placement(spec, n, params, rng)?;
    let w = spec.w;
    let (origin, adversaries) = match spec.kind {
        AttackKind::Single => (0, basic_single_attack(n, &drawn, w)?),
        AttackKind::Naive => (lowest_honest(n, &drawn)?, naive_attack(n, &drawn, w)?),
        AttackKind::Cubic => (lowest_honest(n, &drawn)?, cubic_attack(n, &drawn, w)?),
        AttackKind::Random => {
            // the origin is fixed; if it was drawn it runs the honest code
            let active: Vec<usize> = drawn.iter().copied().filter(|&p| p != 0).collect();
            if active.len() >= n {
                return Err(AttackError::Precondition("no honest processor left".into()));
            }
            (0, randomized_attack(n, &active, spec.c, w))
        }
        AttackKind::SumAbuse => (0, sum_abuse_attack(n, &drawn, w)?),
        AttackKind::PhaseRush => (0, phase_rushing_attack(n, &drawn, params, w)?),
    };
    let mut slots: Vec<Option<Box<dyn Strategy>>> = (0..n).map(|_| None).collect();
    let mut coalition = Vec::with_capacity(adversaries.len());
    for (p, s) in adversaries {
        coalition.push(p);
        slots[p] = Some(s);
    }
    coalition.sort_unstable();
    let strategies = slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.unwrap_or_else(|| honest_strategy(protocol, i, n, origin, inputs[i], params)))
        .collect();
    Ok(Deployment { coalition, drawn, origin, strategies, wakers: protocol.wakers(n, origin) })
}
