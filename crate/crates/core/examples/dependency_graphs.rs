//! Happens-before and calculation-dependency graphs of a PhaseAsyncLead run.

use fairring::harness::trial_rng;
use fairring::oracle::{build_graphs, is_validated, reachable};
use fairring::protocols::{draw_inputs, honest_strategies, PhaseParams, ProtocolKind};
use fairring::ring::{simulate, SimOptions};

fn main() {
    let n = 6;
    let params = PhaseParams { l: 2, m: 72, fseed: 1 };
    let inputs = draw_inputs(n, params.m, &mut trial_rng(1, 0));
    let ex = simulate(honest_strategies(ProtocolKind::Phase, n, 0, &inputs, &params), &[0], &SimOptions::default());
    let g = build_graphs(ex.transcript.as_ref().unwrap(), &[]).unwrap();
    println!("{} events, hb {} edges, cd {} edges", g.events.len(), g.hb.edge_count(), g.cd.edge_count());
    println!("acyclic: hb {} cd {}", g.hb.is_acyclic(), g.cd.is_acyclic());
    for h in 0..n {
        let next = g.s((h + 1) % n);
        println!(
            "h = {h}: s ⇝c r {:?}, r(h) ⇝ s(h+1) {}",
            is_validated(h, &g),
            reachable(&g, &g.hb, g.r(h), next).unwrap()
        );
    }
}
