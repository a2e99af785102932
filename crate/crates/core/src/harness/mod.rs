//! Monte-Carlo trial runner and reports.

pub mod config;
pub mod stats;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use config::{Format, Settings};
pub use stats::{binomial_band, chi_square_p, tv_distance, StatsError};

use crate::attacks::{deploy, AttackError, AttackSpec};
use crate::oracle::{validate_execution, OracleError, Verdict};
use crate::protocols::{draw_inputs, honest_strategies, PhaseParams, ProtocolKind, SecretInput};
use crate::ring::{simulate, Execution, Outcome, ProcessorId, Schedule, SimOptions};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub protocol: ProtocolKind,
    pub params: PhaseParams,
    /// Origin for honest A-LEAD runs. Attacks choose their own.
    pub origin: ProcessorId,
    pub schedule: Schedule,
    /// Cross-check every A-LEAD trial against the validity oracle.
    pub oracle: bool,
}

impl RunConfig {
    pub fn new(protocol: ProtocolKind, n: usize) -> Self {
        RunConfig {
            n,
            protocol,
            params: PhaseParams::defaults(n.max(2), 0),
            origin: 0,
            schedule: Schedule::RoundRobin,
            oracle: false,
        }
    }

    pub fn with_params(mut self, params: PhaseParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_oracle(mut self, on: bool) -> Self {
        self.oracle = on;
        self
    }

    pub fn validate(&self, attack: Option<&AttackSpec>) -> Result<(), HarnessError> {
        if self.n < 2 {
            return Err(HarnessError::Config(format!("n = {} but a ring needs n ≥ 2", self.n)));
        }
        if self.origin >= self.n {
            return Err(HarnessError::Config(format!("origin {} outside the ring", self.origin)));
        }
        if self.protocol.is_phase() {
            self.params.check(self.n).map_err(HarnessError::Config)?;
            if self.origin != 0 {
                return Err(HarnessError::Config("phase protocols use origin 0".into()));
            }
        }
        if self.oracle && self.protocol != ProtocolKind::ALead {
            return Err(HarnessError::Config("the validity oracle only understands A-LEAD runs".into()));
        }
        if let Some(a) = attack {
            if a.kind.protocol() != self.protocol {
                return Err(HarnessError::Config(format!(
                    "attack `{}` runs against `{}`, not `{}`",
                    a.kind,
                    a.kind.protocol(),
                    self.protocol
                )));
            }
            if a.w >= self.n as u64 {
                return Err(HarnessError::Config(format!("target {} outside [0, {})", a.w, self.n)));
            }
        }
        Ok(())
    }
}

/// RNG for trial `index`: ChaCha8 keyed by the master seed, stream = index.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

pub struct TrialResult {
    pub outcome: Outcome,
    /// Outcome counting only processors outside the coalition.
    pub honest_outcome: Outcome,
    pub coalition: Vec<ProcessorId>,
    pub inputs: Vec<SecretInput>,
    pub verdict: Option<Verdict>,
    pub execution: Execution,
}

/// Run one trial. The transcript is kept when `record` is set or when the
/// oracle needs it.
pub fn run_trial(
    cfg: &RunConfig,
    attack: Option<&AttackSpec>,
    master_seed: u64,
    index: u64,
    record: bool,
) -> Result<TrialResult, HarnessError> {
    let n = cfg.n;
    let mut rng = trial_rng(master_seed, index);
    let inputs = draw_inputs(n, cfg.params.m, &mut rng);
    let (strategies, wakers, coalition) = match attack {
        Some(spec) => {
            let dep = deploy(spec, cfg.protocol, n, &cfg.params, &inputs, &mut rng)?;
            (dep.strategies, dep.wakers, dep.coalition)
        }
        None => (
            honest_strategies(cfg.protocol, n, cfg.origin, &inputs, &cfg.params),
            cfg.protocol.wakers(n, cfg.origin),
            Vec::new(),
        ),
    };
    let opts = SimOptions { schedule: cfg.schedule, seed: rng.gen(), record: record || cfg.oracle, budget: None };
    let execution = simulate(strategies, &wakers, &opts);
    let outcome = execution.outcome();
    let honest_outcome = execution.outcome_among((0..n).filter(|p| !coalition.contains(p)));
    let verdict = if cfg.oracle {
        let t = execution.transcript.as_ref().expect("recorded for the oracle");
        Some(validate_execution(t, &coalition, n)?)
    } else {
        None
    };
    Ok(TrialResult { outcome, honest_outcome, coalition, inputs, verdict, execution })
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct OracleStats {
    pub checked: u64,
    pub agree: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub config: RunConfig,
    pub attack: Option<AttackSpec>,
    pub trials: u64,
    pub master_seed: u64,
    /// Elected outcomes per leader.
    pub histogram: Vec<u64>,
    pub failures: BTreeMap<String, u64>,
    pub fail_rate: f64,
    /// `max_j Pr̂(j) − 1/n` over all trials.
    pub eps_hat: f64,
    pub tv_distance: Option<f64>,
    pub chi_square_p: Option<f64>,
    /// Trials that elected the attack target.
    pub target_hits: Option<u64>,
    pub success_rate: Option<f64>,
    pub oracle: Option<OracleStats>,
    pub wall_time_ms: u128,
}

#[derive(Default)]
struct Tally {
    histogram: Vec<u64>,
    failures: BTreeMap<String, u64>,
    oracle: OracleStats,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        if self.histogram.len() < other.histogram.len() {
            self.histogram.resize(other.histogram.len(), 0);
        }
        for (a, b) in self.histogram.iter_mut().zip(other.histogram) {
            *a += b;
        }
        for (k, v) in other.failures {
            *self.failures.entry(k).or_default() += v;
        }
        self.oracle.checked += other.oracle.checked;
        self.oracle.agree += other.oracle.agree;
        self
    }
}

/// Run `trials` independent trials. Results depend only on the arguments,
/// not on how rayon schedules the work.
pub fn run_trials(
    cfg: &RunConfig,
    attack: Option<&AttackSpec>,
    trials: u64,
    master_seed: u64,
) -> Result<TrialReport, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::Config("trials must be at least 1".into()));
    }
    cfg.validate(attack)?;
    // placement errors surface here, before the real run
    if let Some(spec) = attack {
        let mut rng = trial_rng(master_seed, 0);
        let inputs = draw_inputs(cfg.n, cfg.params.m, &mut rng);
        deploy(spec, cfg.protocol, cfg.n, &cfg.params, &inputs, &mut rng)?;
    }
    let n = cfg.n;
    let start = Instant::now();
    let tally = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Tally, HarnessError> {
            let r = run_trial(cfg, attack, master_seed, i, false)?;
            let mut t = Tally { histogram: vec![0; n], ..Default::default() };
            match r.outcome {
                Outcome::Elected(j) => t.histogram[j as usize] += 1,
                Outcome::Fail(reason) => *t.failures.entry(reason.label().to_string()).or_default() += 1,
            }
            if let Some(v) = r.verdict {
                t.oracle.checked += 1;
                if v.elected() == r.honest_outcome.elected() {
                    t.oracle.agree += 1;
                }
            }
            Ok(t)
        })
        .try_reduce(|| Tally { histogram: vec![0; n], ..Default::default() }, |a, b| Ok(a.merge(b)))?;
    let wall = start.elapsed().as_millis();

    let hist = tally.histogram;
    let elected: u64 = hist.iter().sum();
    let max = hist.iter().copied().max().unwrap_or(0);
    let target_hits = attack.map(|a| hist[a.w as usize]);
    Ok(TrialReport {
        config: cfg.clone(),
        attack: attack.cloned(),
        trials,
        master_seed,
        fail_rate: (trials - elected) as f64 / trials as f64,
        eps_hat: max as f64 / trials as f64 - 1.0 / n as f64,
        tv_distance: (elected > 0).then(|| tv_distance(&hist, n)).transpose()?,
        chi_square_p: (elected > 0).then(|| chi_square_p(&hist, n)).transpose()?,
        target_hits,
        success_rate: target_hits.map(|h| h as f64 / trials as f64),
        oracle: cfg.oracle.then_some(tally.oracle),
        histogram: hist,
        failures: tally.failures,
        wall_time_ms: wall,
    })
}

impl TrialReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Histogram as CSV: `outcome,count`, failures last.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("outcome,count\n");
        for (j, c) in self.histogram.iter().enumerate() {
            let _ = writeln!(s, "{j},{c}");
        }
        for (k, c) in &self.failures {
            let _ = writeln!(s, "FAIL:{k},{c}");
        }
        s
    }

    pub const SUMMARY_HEADER: &'static str =
        "protocol,attack,n,w,k,l,m,trials,seed,fail_rate,eps_hat,tv,chi2_p,success_rate,oracle_agree,wall_ms";

    /// One row under [`Self::SUMMARY_HEADER`].
    pub fn summary_row(&self) -> String {
        let c = &self.config;
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
        let (attack, w, k) = match &self.attack {
            Some(a) => (a.kind.to_string(), a.w.to_string(), a.k.map(|k| k.to_string()).unwrap_or_default()),
            None => (String::new(), String::new(), String::new()),
        };
        let oracle = self.oracle.as_ref().map(|o| format!("{}/{}", o.agree, o.checked)).unwrap_or_default();
        format!(
            "{},{attack},{},{w},{k},{},{},{},{},{:.6},{:.6},{},{},{},{oracle},{}",
            c.protocol,
            c.n,
            c.params.l,
            c.params.m,
            self.trials,
            self.master_seed,
            self.fail_rate,
            self.eps_hat,
            opt(self.tv_distance),
            opt(self.chi_square_p),
            opt(self.success_rate),
            self.wall_time_ms
        )
    }
}

impl fmt::Display for TrialReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        write!(f, "protocol {}  n {}  trials {}  seed {}", c.protocol, c.n, self.trials, self.master_seed)?;
        if let Some(a) = &self.attack {
            write!(f, "  attack {} (w = {})", a.kind, a.w)?;
        }
        writeln!(f)?;
        writeln!(f, "{:>8}  {:>10}  {:>8}", "leader", "count", "freq")?;
        for (j, &cnt) in self.histogram.iter().enumerate() {
            if cnt > 0 {
                writeln!(f, "{j:>8}  {cnt:>10}  {:>8.4}", cnt as f64 / self.trials as f64)?;
            }
        }
        for (k, &cnt) in &self.failures {
            writeln!(f, "{k:>8}  {cnt:>10}  {:>8.4}", cnt as f64 / self.trials as f64)?;
        }
        write!(f, "fail rate {:.4}  eps_hat {:.4}", self.fail_rate, self.eps_hat)?;
        if let Some(tv) = self.tv_distance {
            write!(f, "  tv {tv:.4}")?;
        }
        if let Some(p) = self.chi_square_p {
            write!(f, "  chi2 p {p:.3}")?;
        }
        if let Some(s) = self.success_rate {
            write!(f, "  success {s:.4}")?;
        }
        if let Some(o) = &self.oracle {
            write!(f, "  oracle {}/{}", o.agree, o.checked)?;
        }
        writeln!(f, "  ({} ms)", self.wall_time_ms)
    }
}
