//! Random deviations of A-LEAD^uni for cross-checking the oracle against the
//! simulator.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::attacks::{cubic_attack, naive_attack};
use crate::protocols::ALead;
use crate::ring::{simulate, Execution, Msg, Outbox, Outcome, ProcessorId, SimOptions, Strategy};

use super::{validate_execution, OracleError, Verdict};

/// Edit applied to an adversary's outgoing stream. Indices count the
/// messages the honest code would have sent, from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Perturbation {
    None,
    Shift { at: usize, delta: u64 },
    /// Adds `delta` at one index and subtracts it at another.
    PairShift { at: usize, other: usize, delta: u64 },
    Drop { at: usize },
    Extra { at: usize, value: u64 },
    ReplaceLast { value: u64 },
}

/// Honest A-LEAD code whose output stream is edited on the fly.
pub struct Perturbed {
    inner: ALead,
    n: u64,
    edit: Perturbation,
    index: usize,
}

impl Perturbed {
    pub fn new(n: usize, d: u64, origin: bool, edit: Perturbation) -> Self {
        Perturbed { inner: ALead::new(n, d, origin), n: n as u64, edit, index: 0 }
    }

    fn rewrite(&mut self, scratch: Outbox, out: &mut Outbox) {
        let n = self.n;
        let (sends, terminal) = scratch.into_parts();
        for m in sends {
            let t = self.index;
            self.index += 1;
            let mut v = m.value;
            match self.edit {
                Perturbation::None => {}
                Perturbation::Shift { at, delta } if at == t => v = (v + delta) % n,
                Perturbation::PairShift { at, other, delta } => {
                    if at == t {
                        v = (v + delta) % n;
                    }
                    if other == t {
                        v = (v + n - delta % n) % n;
                    }
                }
                Perturbation::Drop { at } if at == t => continue,
                Perturbation::Extra { at, value } if at == t => out.send(Msg::data(value)),
                Perturbation::ReplaceLast { value } if t + 1 == n as usize => v = value,
                _ => {}
            }
            out.send(Msg::data(v));
        }
        match terminal {
            Some(crate::ring::Terminal::Output(x)) => out.output(x),
            Some(crate::ring::Terminal::Abort) => out.abort(),
            None => {}
        }
    }
}

impl Strategy for Perturbed {
    fn wake(&mut self, out: &mut Outbox) {
        let mut scratch = Outbox::default();
        self.inner.wake(&mut scratch);
        self.rewrite(scratch, out);
    }

    fn receive(&mut self, msg: Msg, out: &mut Outbox) {
        let mut scratch = Outbox::default();
        self.inner.receive(msg, &mut scratch);
        self.rewrite(scratch, out);
    }
}

pub fn random_perturbation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Perturbation {
    let nn = n as u64;
    let at = rng.gen_range(0..n);
    match rng.gen_range(0..6) {
        0 => Perturbation::None,
        1 => Perturbation::Shift { at, delta: rng.gen_range(1..nn) },
        2 => Perturbation::PairShift { at, other: rng.gen_range(0..n), delta: rng.gen_range(1..nn) },
        3 => Perturbation::Drop { at },
        4 => Perturbation::Extra { at, value: rng.gen_range(0..nn) },
        _ => Perturbation::ReplaceLast { value: rng.gen_range(0..nn) },
    }
}

/// One fuzz case: a random coalition, each member either perturbing honest
/// code or, now and then, the whole coalition running a real attack.
pub struct FuzzCase {
    pub n: usize,
    pub origin: ProcessorId,
    pub coalition: Vec<ProcessorId>,
    pub d: Vec<u64>,
    pub strategies: Vec<Box<dyn Strategy>>,
    pub label: String,
}

pub fn fuzz_case<R: Rng + ?Sized>(n: usize, rng: &mut R) -> FuzzCase {
    let nn = n as u64;
    let d: Vec<u64> = (0..n).map(|_| rng.gen_range(0..nn)).collect();
    let origin = rng.gen_range(0..n);
    let k = rng.gen_range(1..n);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut coalition: Vec<usize> = ids[..k].to_vec();
    coalition.sort_unstable();

    let mut strategies: Vec<Option<Box<dyn Strategy>>> = (0..n).map(|_| None).collect();
    let mut label = String::new();
    if !coalition.contains(&origin) && rng.gen_bool(0.2) {
        let w = rng.gen_range(0..nn);
        let built = if rng.gen_bool(0.5) { naive_attack(n, &coalition, w) } else { cubic_attack(n, &coalition, w) };
        if let Ok(adv) = built {
            label = format!("attack w={w}");
            for (p, s) in adv {
                strategies[p] = Some(s);
            }
        }
    }
    if label.is_empty() {
        let mut parts = Vec::new();
        for &a in &coalition {
            let edit = random_perturbation(n, rng);
            parts.push(format!("{a}:{edit:?}"));
            strategies[a] = Some(Box::new(Perturbed::new(n, d[a], a == origin, edit)));
        }
        label = parts.join(" ");
    }
    let strategies = strategies
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.unwrap_or_else(|| Box::new(ALead::new(n, d[i], i == origin))))
        .collect();
    FuzzCase { n, origin, coalition, d, strategies, label }
}

/// A fuzz case after simulation and validation.
pub struct FuzzRun {
    pub verdict: Verdict,
    /// Outcome among the processors outside the coalition.
    pub honest: Outcome,
    pub execution: Execution,
}

impl FuzzRun {
    /// `Valid(s)` exactly when the honest processors elect `s`.
    pub fn agrees(&self) -> bool {
        self.verdict.elected() == self.honest.elected()
    }
}

pub fn run_case(case: FuzzCase, opts: &SimOptions) -> Result<FuzzRun, OracleError> {
    let FuzzCase { n, origin, coalition, strategies, .. } = case;
    let opts = SimOptions { record: true, ..opts.clone() };
    let execution = simulate(strategies, &[origin], &opts);
    let honest = execution.outcome_among((0..n).filter(|p| !coalition.contains(p)));
    let t = execution.transcript.as_ref().expect("recorded");
    let verdict = validate_execution(t, &coalition, n)?;
    Ok(FuzzRun { verdict, honest, execution })
}
