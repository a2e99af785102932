use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use fairring::harness::{run_trial, run_trials, Format, HarnessError, Settings, TrialReport};
use fairring::reductions::{self as red, OutcomeDistribution, Prob};
use fairring::treesim::{self as ts, Graph, ProtocolTree, TreeSimulation};

#[derive(Parser)]
#[command(name = "fairring", version, about = "Fair leader election on asynchronous rings: simulate, attack, analyse")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Honest Monte-Carlo run.
    Run(Common),
    /// Run an attack (needs --attack).
    Attack(Common),
    /// Grid over comma lists given to --n, --target, --k, --l, --m, --fseed.
    Sweep(Common),
    /// k-simulated trees and assure search.
    Tree(TreeArgs),
    /// Reduction arithmetic, exact or on live runs.
    Reduce(ReduceArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Flat key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    /// basic | alead | phase | phase-sum
    #[arg(long)]
    protocol: Option<String>,
    /// single | naive | cubic | random | sum-abuse | phase-rush
    #[arg(long)]
    attack: Option<String>,
    #[arg(long, visible_alias = "w")]
    target: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// Comma-separated adversary ids.
    #[arg(long)]
    positions: Option<String>,
    #[arg(long)]
    l: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    fseed: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// rr | random
    #[arg(long)]
    schedule: Option<String>,
    /// Check every trial with the validity oracle (A-LEAD only).
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json | csv
    #[arg(long)]
    format: Option<String>,
    /// Circularity length of the randomized attack.
    #[arg(long)]
    c: Option<String>,
    /// Adversary probability of the randomized attack.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    origin: Option<String>,
    /// Write the JSON-lines transcript of trial 0 here.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

impl Common {
    fn flags(&self) -> Vec<(&'static str, &str)> {
        let fields = [
            ("n", &self.n),
            ("protocol", &self.protocol),
            ("attack", &self.attack),
            ("target", &self.target),
            ("k", &self.k),
            ("positions", &self.positions),
            ("l", &self.l),
            ("m", &self.m),
            ("fseed", &self.fseed),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("schedule", &self.schedule),
            ("format", &self.format),
            ("c", &self.c),
            ("p", &self.p),
            ("origin", &self.origin),
        ];
        let mut v: Vec<(&'static str, &str)> =
            fields.into_iter().filter_map(|(k, x)| x.as_deref().map(|x| (k, x))).collect();
        if self.oracle {
            v.push(("oracle", "true"));
        }
        v
    }

    fn base(&self) -> Result<Settings, String> {
        match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                Settings::from_kv(&text).map_err(|e| e.to_string())
            }
            None => Ok(Settings::default()),
        }
    }

    fn settings(&self) -> Result<Settings, String> {
        self.settings_except(&[])
    }

    fn settings_except(&self, skip: &[&str]) -> Result<Settings, String> {
        let mut over = Settings::default();
        for (k, v) in self.flags().into_iter().filter(|(k, _)| !skip.contains(k)) {
            over.set(k, v).map_err(|e| e.to_string())?;
        }
        if let Some(out) = &self.out {
            over.out = Some(out.clone());
        }
        Ok(self.base()?.overlay(over))
    }
}

#[derive(Args)]
struct TreeArgs {
    #[command(subcommand)]
    op: TreeOp,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TreeOp {
    /// Split a connected graph (JSON `{"n", "edges"}`) into a ⌈n/2⌉-simulated tree.
    Decompose { graph: PathBuf },
    /// Check a simulation (JSON `{"tree", "map", "k"}`) of a graph.
    Verify { graph: PathBuf, sim: PathBuf },
    /// Assure search on a protocol tree: all (party, bit) pairs for two
    /// parties, leaf folding on larger tree networks.
    Assure { protocol: PathBuf },
    /// Check both two-sided disjunctions over the exhaustive small family.
    Family {
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Reduction {
    /// Leader parity as a coin; `--eps` biases the even leaders.
    Parity,
    /// log₂ n coins as a leader; `--p0` is Pr(coin = 0).
    Coins,
    /// Bit consensus as a coin; bound ε + 2^{k−n}.
    Consensus,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(value_enum)]
    kind: Reduction,
    #[arg(long, default_value = "0")]
    eps: String,
    #[arg(long, default_value = "1/2")]
    p0: String,
    /// Parity only: take the leader distribution from a simulated run
    /// described by the usual run flags.
    #[arg(long)]
    live: bool,
    #[command(flatten)]
    run: Common,
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn render(r: &TrialReport, format: Option<Format>, to_file: bool) -> String {
    match format {
        Some(Format::Csv) => r.to_csv(),
        Some(Format::Json) => r.to_json(),
        None if to_file => r.to_json(),
        None => r.to_string(),
    }
}

fn simulate_cmd(c: &Common, attack: bool) -> Result<(), String> {
    let mut s = c.settings()?;
    if !attack {
        s.attack = None;
    } else if s.attack.is_none() {
        return Err("attack needs --attack".into());
    }
    let (cfg, spec) = s.build().map_err(|e| e.to_string())?;
    let report = run_trials(&cfg, spec.as_ref(), s.trials(), s.seed()).map_err(|e| e.to_string())?;
    if let Some(path) = &c.transcript {
        let t = run_trial(&cfg, spec.as_ref(), s.seed(), 0, true).map_err(|e| e.to_string())?;
        let jsonl = t.execution.transcript.expect("recorded").to_jsonl();
        fs::write(path, jsonl).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    emit(s.out.as_deref(), &render(&report, s.format, s.out.is_some()))
}

const GRID_KEYS: [&str; 6] = ["n", "target", "k", "l", "m", "fseed"];

fn sweep_cmd(c: &Common) -> Result<(), String> {
    let base = c.settings_except(&GRID_KEYS)?;
    let axes: Vec<(&str, Vec<String>)> = c
        .flags()
        .into_iter()
        .filter(|(k, _)| GRID_KEYS.contains(k))
        .map(|(k, v)| (k, v.split(',').map(|x| x.trim().to_string()).collect()))
        .collect();
    let mut points: Vec<Vec<(&str, String)>> = vec![vec![]];
    for (k, values) in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((*k, v.clone()));
                    q
                })
            })
            .collect();
    }
    let mut reports = Vec::new();
    for point in points {
        let mut s = base.clone();
        for (k, v) in &point {
            s.set(k, v).map_err(|e| e.to_string())?;
        }
        let (cfg, spec) = s.build().map_err(|e| e.to_string())?;
        match run_trials(&cfg, spec.as_ref(), s.trials(), s.seed()) {
            Ok(r) => reports.push(r),
            Err(HarnessError::Attack(e)) => eprintln!("skipping {point:?}: {e}"),
            Err(e) => return Err(e.to_string()),
        }
    }
    let text = match base.format {
        Some(Format::Json) => serde_json::to_string_pretty(&reports).expect("reports serialize"),
        _ => {
            let mut t = format!("{}\n", TrialReport::SUMMARY_HEADER);
            for r in &reports {
                t.push_str(&r.summary_row());
                t.push('\n');
            }
            t
        }
    };
    emit(base.out.as_deref(), &text)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn tree_cmd(t: &TreeArgs) -> Result<(), String> {
    let value = match &t.op {
        TreeOp::Decompose { graph } => {
            let g: Graph = read_json(graph)?;
            let g = Graph::new(g.n, &g.edges).map_err(|e| e.to_string())?;
            json!(ts::decompose_half(&g).map_err(|e| e.to_string())?)
        }
        TreeOp::Verify { graph, sim } => {
            let g: Graph = read_json(graph)?;
            let s: TreeSimulation = read_json(sim)?;
            match ts::verify_k_simulation(&g, &s.tree, &s.map, s.k) {
                Ok(()) => json!({ "ok": true }),
                Err(v) => json!({ "ok": false, "violation": v, "reason": v.to_string() }),
            }
        }
        TreeOp::Assure { protocol } => {
            let text = fs::read_to_string(protocol).map_err(|e| format!("{}: {e}", protocol.display()))?;
            let p = ProtocolTree::from_json(&text).map_err(|e| e.to_string())?;
            if p.parties == 2 {
                let set = ts::assure_search_two_party(&p).map_err(|e| e.to_string())?;
                json!({ "two_side_holds": ts::two_side_holds(&set), "assured": set })
            } else {
                json!(ts::tree_assure_search(&p).map_err(|e| e.to_string())?)
            }
        }
        TreeOp::Family { depth } => {
            let mut rows = Vec::new();
            for inputs in [[1, 1], [1, 2], [2, 1], [2, 2]] {
                let (mut held, mut replayed) = (0u64, 0u64);
                let count = ts::for_each_two_party(*depth, inputs, |p| {
                    let set = ts::assure_search_two_party(p).expect("family protocols are valid");
                    held += ts::two_side_holds(&set) as u64;
                    replayed += set.iter().all(|d| ts::replay(p, d).is_ok()) as u64;
                });
                rows.push(json!({ "inputs": inputs, "protocols": count, "two_side_holds": held, "witnesses_replay": replayed }));
            }
            json!(rows)
        }
    };
    emit(t.out.as_deref(), &serde_json::to_string_pretty(&value).expect("json"))
}

fn exact(p: &Prob) -> serde_json::Value {
    json!({ "exact": p.to_string(), "approx": red::to_f64(p) })
}

fn dist_json(d: &OutcomeDistribution) -> serde_json::Value {
    json!({ "probs": d.probs.iter().map(exact).collect::<Vec<_>>(), "fail": exact(&d.fail), "bias": exact(&d.bias()) })
}

fn reduce_cmd(r: &ReduceArgs) -> Result<(), String> {
    let s = r.run.settings()?;
    let n = s.n.ok_or("reduce needs --n")?;
    let eps = red::parse_prob(&r.eps).map_err(|e| e.to_string())?;
    let value = match r.kind {
        Reduction::Parity => {
            if n % 2 == 1 {
                return Err(red::ReductionError::OddN(n).to_string());
            }
            let fle = if r.live {
                let (cfg, spec) = s.build().map_err(|e| e.to_string())?;
                let rep = run_trials(&cfg, spec.as_ref(), s.trials(), s.seed()).map_err(|e| e.to_string())?;
                let fails = rep.failures.values().sum();
                OutcomeDistribution::from_counts(&rep.histogram, fails).map_err(|e| e.to_string())?
            } else {
                // even leaders gain eps, odd ones lose it
                let base = red::ratio(1, n as i64);
                let probs = (0..n).map(|j| if j % 2 == 0 { &base + &eps } else { &base - &eps }).collect();
                OutcomeDistribution::new(probs, red::ratio(0, 1)).map_err(|e| e.to_string())?
            };
            let coin = red::coin_from_fle_dist(&fle).map_err(|e| e.to_string())?;
            let bound = red::coin_from_fle_bound(n, &fle.bias());
            json!({ "leader": dist_json(&fle), "coin": dist_json(&coin), "bound": exact(&bound) })
        }
        Reduction::Coins => {
            let p0 = red::parse_prob(&r.p0).map_err(|e| e.to_string())?;
            let coin = OutcomeDistribution::new(vec![p0.clone(), red::ratio(1, 1) - &p0], red::ratio(0, 1))
                .map_err(|e| e.to_string())?;
            let fle = red::fle_from_coins_dist(&coin, n).map_err(|e| e.to_string())?;
            let bound = red::fle_from_coins_bound(n, &coin.bias());
            json!({ "coin": dist_json(&coin), "leader": dist_json(&fle), "bound": exact(&bound) })
        }
        Reduction::Consensus => {
            let k = s.k.unwrap_or(0);
            json!({ "n": n, "k": k, "eps": exact(&eps), "bound": exact(&red::coin_from_bit_consensus_bound(n, k, &eps)) })
        }
    };
    emit(s.out.as_deref(), &serde_json::to_string_pretty(&value).expect("json"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Run(c) => simulate_cmd(c, false),
        Cmd::Attack(c) => simulate_cmd(c, true),
        Cmd::Sweep(c) => sweep_cmd(c),
        Cmd::Tree(t) => tree_cmd(t),
        Cmd::Reduce(r) => reduce_cmd(r),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
