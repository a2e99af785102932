//! The thirteen acceptance criteria, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fairring::attacks::{cubic_distances, AttackKind, AttackSpec};
use fairring::harness::{binomial_band, run_trials, trial_rng, RunConfig};
use fairring::oracle::fuzz::{fuzz_case, run_case};
use fairring::oracle::{build_graphs, is_validated, reachable, Validation};
use fairring::protocols::{draw_inputs, honest_strategies, PhaseParams, ProtocolKind};
use fairring::reductions::{coin_from_fle_dist, fle_from_coins_dist, ratio, OutcomeDistribution};
use fairring::ring::{simulate, SimOptions};
use fairring::treesim::{
    connected_graphs, decompose_half, for_each_two_party, random_connected_graph, replay, two_side_holds,
    verify_k_simulation,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rate(cfg: &RunConfig, spec: &AttackSpec, trials: u64, seed: u64) -> Result<f64, String> {
    run_trials(cfg, Some(spec), trials, seed).map_err(err)?.success_rate.ok_or_else(|| "no success rate".into())
}

fn c1() -> Check {
    let cfg = RunConfig::new(ProtocolKind::Basic, 8);
    for w in 0..8 {
        let r = rate(&cfg, &AttackSpec::new(AttackKind::Single, w), 1000, w)?;
        ensure(r == 1.0, format!("w = {w}: rate {r}"))?;
    }
    Ok("Elected(w) in 1000/1000 trials for every w ∈ [0,8)".into())
}

fn c2() -> Check {
    let cfg = RunConfig::new(ProtocolKind::ALead, 9);
    for w in 0..9 {
        let r = rate(&cfg, &AttackSpec::new(AttackKind::Naive, w).at(&[0, 3, 6]), 100, w)?;
        ensure(r == 1.0, format!("w = {w}: rate {r}"))?;
    }
    Ok("Elected(w) in 100/100 trials for every w ∈ [0,9)".into())
}

fn c3() -> Check {
    ensure(cubic_distances(3, 15).map_err(err)? == vec![6, 4, 2], "schedule is not [6,4,2]")?;
    let cfg = RunConfig::new(ProtocolKind::ALead, 15).with_oracle(true);
    for w in 0..15 {
        let r = run_trials(&cfg, Some(&AttackSpec::new(AttackKind::Cubic, w).with_k(3)), 100, 300 + w).map_err(err)?;
        ensure(r.success_rate == Some(1.0), format!("w = {w}: rate {:?}", r.success_rate))?;
        let o = r.oracle.unwrap_or_default();
        ensure(o.agree == 100 && o.checked == 100, format!("w = {w}: oracle {}/{}", o.agree, o.checked))?;
    }
    Ok("distances [6,4,2]; 1500/1500 Elected(w), every transcript Valid(w)".into())
}

fn c4() -> Check {
    let n = 1024;
    let cfg = RunConfig::new(ProtocolKind::ALead, n);
    let spec = AttackSpec::new(AttackKind::Random, 9).with_c(3);
    let r = run_trials(&cfg, Some(&spec), 200, 4).map_err(err)?;
    let s = r.success_rate.unwrap_or(0.0);
    ensure(s >= 0.95, format!("success {s:.3} < 0.95"))?;
    Ok(format!("success {s:.3} over 200 placements (p = √(8 ln n / n))"))
}

fn c5() -> Check {
    let n = 16;
    let trials = 100_000;
    let r = run_trials(&RunConfig::new(ProtocolKind::ALead, n), None, trials, 5).map_err(err)?;
    ensure(r.fail_rate == 0.0, format!("fail rate {}", r.fail_rate))?;
    let (lo, hi) = binomial_band(1.0 / n as f64, trials, 5.0);
    let freqs: Vec<f64> = r.histogram.iter().map(|&c| c as f64 / trials as f64).collect();
    let (mn, mx) = freqs.iter().fold((1.0f64, 0.0f64), |(a, b), &f| (a.min(f), b.max(f)));
    ensure(mn >= lo && mx <= hi, format!("frequencies [{mn:.5}, {mx:.5}] outside [{lo:.5}, {hi:.5}]"))?;
    Ok(format!("frequencies in [{mn:.5}, {mx:.5}] ⊂ [{lo:.5}, {hi:.5}], no failures"))
}

fn c6() -> Check {
    let n = 40;
    let cfg = RunConfig::new(ProtocolKind::PhaseSum, n).with_params(PhaseParams { l: 4, m: 2 * 40 * 40, fseed: 0 });
    for w in [6, 0, 13, 27, 39] {
        let r = rate(&cfg, &AttackSpec::new(AttackKind::SumAbuse, w), 100, w)?;
        ensure(r == 1.0, format!("w = {w}: rate {r}"))?;
    }
    Ok("adversaries {0,10,20,30}: Elected(w) always for w ∈ {6,0,13,27,39}".into())
}

fn phase36() -> RunConfig {
    RunConfig::new(ProtocolKind::Phase, 36).with_params(PhaseParams { l: 4, m: 2 * 36 * 36, fseed: 7 })
}

fn c7() -> Check {
    let r = run_trials(&phase36(), None, 10_000, 7).map_err(err)?;
    ensure(r.failures.is_empty(), format!("failures {:?}", r.failures))?;
    let tv = r.tv_distance.unwrap_or(1.0);
    ensure(tv < 0.03, format!("tv {tv:.4}"))?;
    Ok(format!("no aborts, every run unanimous, tv {tv:.4}"))
}

fn c8() -> Check {
    let spec = AttackSpec::new(AttackKind::PhaseRush, 0).with_k(9);
    let r = run_trials(&phase36(), Some(&spec), 200, 8).map_err(err)?;
    let s = r.success_rate.unwrap_or(0.0);
    let base = run_trials(&phase36(), None, 2000, 80).map_err(err)?;
    let b = base.histogram[0] as f64 / 2000.0;
    ensure(s >= 0.9, format!("success {s:.3}"))?;
    Ok(format!("Pr(Elected(0)) {s:.3} vs honest {b:.3}"))
}

fn c9() -> Check {
    let mut checked = 0;
    for i in 0..10_000u64 {
        let mut rng = trial_rng(9, i);
        let n = 4 + (i % 5) as usize;
        let case = fuzz_case(n, &mut rng);
        let label = case.label.clone();
        let r = run_case(case, &SimOptions::default()).map_err(err)?;
        ensure(r.agrees(), format!("case {i} ({label}): {:?} vs {}", r.verdict, r.honest))?;
        checked += 1;
    }
    Ok(format!("{checked}/{checked} fuzzed executions agree"))
}

fn c10() -> Check {
    let n = 8;
    let params = PhaseParams { l: 2, m: 128, fseed: 10 };
    let inputs = draw_inputs(n, params.m, &mut trial_rng(10, 0));
    let ex = simulate(honest_strategies(ProtocolKind::Phase, n, 0, &inputs, &params), &[0], &SimOptions::default());
    let g = build_graphs(ex.transcript.as_ref().ok_or("no transcript")?, &[]).map_err(err)?;
    ensure(g.hb.is_acyclic() && g.cd.is_acyclic(), "cycle")?;
    ensure(g.cd.edges().all(|(u, v)| g.hb.path(u, v)), "cd edge without hb path")?;
    let chain: Vec<_> = (0..n).flat_map(|h| [g.s(h), g.r(h)]).collect();
    for w in chain.windows(2) {
        ensure(reachable(&g, &g.hb, w[0], w[1]).map_err(err)?, format!("{:?} does not reach {:?}", w[0], w[1]))?;
    }
    ensure((0..n).all(|h| is_validated(h, &g) == Validation::Validated), "unvalidated processor")?;
    Ok(format!("both acyclic, cd ⊆ hb ({} edges), chain of {} events, all validated", g.cd.edge_count(), chain.len()))
}

fn c11() -> Check {
    let mut total = 0;
    for inputs in [[1, 1], [1, 2], [2, 1], [2, 2]] {
        let mut bad = None;
        total += for_each_two_party(3, inputs, |p| {
            if bad.is_some() {
                return;
            }
            let set = fairring::treesim::assure_search_two_party(p).expect("valid family member");
            if !two_side_holds(&set) || set.iter().any(|d| replay(p, d).is_err()) {
                bad = Some(p.to_json());
            }
        });
        if let Some(p) = bad {
            return Err(format!("counterexample {p}"));
        }
    }
    Ok(format!("{total} protocols, both disjunctions hold, every witness replays"))
}

fn c12() -> Check {
    let mut count = 0;
    let mut check = |g: &fairring::treesim::Graph| -> Result<(), String> {
        let sim = decompose_half(g).map_err(err)?;
        verify_k_simulation(g, &sim.tree, &sim.map, g.n.div_ceil(2)).map_err(err)?;
        ensure(sim.tree.is_acyclic() && sim.tree.is_connected(), "quotient is not a tree")?;
        count += 1;
        Ok(())
    };
    for n in 1..=7 {
        for g in connected_graphs(n) {
            check(&g)?;
        }
    }
    let mut rng = trial_rng(12, 0);
    use rand::Rng;
    for _ in 0..500 {
        let n = rng.gen_range(1..=12);
        let p = rng.gen_range(0.0..0.5);
        check(&random_connected_graph(n, p, &mut rng))?;
    }
    Ok(format!("{count} graphs decomposed and verified"))
}

fn c13() -> Check {
    let eps = ratio(1, 100);
    let probs = (0..8).map(|j| if j % 2 == 0 { ratio(1, 8) + &eps } else { ratio(1, 8) - &eps }).collect();
    let fle = OutcomeDistribution::new(probs, ratio(0, 1)).map_err(err)?;
    let coin = coin_from_fle_dist(&fle).map_err(err)?;
    ensure(coin.bias() == ratio(4, 100), format!("coin bias {}", coin.bias()))?;
    let c = OutcomeDistribution::new(vec![ratio(6, 10), ratio(4, 10)], ratio(0, 1)).map_err(err)?;
    let lead = fle_from_coins_dist(&c, 4).map_err(err)?;
    ensure(lead.probs[0] == ratio(36, 100), format!("Pr(leader 0) {}", lead.probs[0]))?;
    Ok(format!("coin bias {} = 0.04, Pr(leader 0) {} = 0.36", coin.bias(), lead.probs[0]))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, u64); 13] = [
        ("basic-lead single adversary", c1, 1),
        ("naive attack", c2, 1),
        ("cubic attack", c3, 5),
        ("randomized attack", c4, 120),
        ("honest uniformity", c5, 30),
        ("sum-variant abuse", c6, 5),
        ("phase honest", c7, 60),
        ("phase rushing", c8, 120),
        ("oracle equivalence", c9, 60),
        ("dependency-graph order", c10, 1),
        ("two-side assure totality", c11, 120),
        ("half decomposition", c12, 60),
        ("reduction arithmetic", c13, 1),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        let slow = took > Duration::from_secs(*limit);
        let (tag, detail) = match (&res, slow) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {limit} s budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} {:>2} {name:<26} {:>8.2?}  {detail}", i + 1, took);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
