//! One honest A-LEAD^uni election on a ten-processor ring, then a thousand.

use fairring::harness::{run_trials, RunConfig};
use fairring::protocols::{data_inputs, honest_strategies, PhaseParams, ProtocolKind};
use fairring::ring::{simulate, SimOptions};

fn main() {
    let d = [3u64, 9, 0, 4, 4, 1, 7, 2, 8, 5];
    let n = d.len();
    let strategies = honest_strategies(ProtocolKind::ALead, n, 0, &data_inputs(&d), &PhaseParams::defaults(n, 0));
    let ex = simulate(strategies, &ProtocolKind::ALead.wakers(n, 0), &SimOptions::default());
    println!("secrets {d:?} sum {} -> {}", d.iter().sum::<u64>(), ex.outcome());
    println!("{} events, {} messages per processor", ex.events, ex.sent[0]);

    let report = run_trials(&RunConfig::new(ProtocolKind::ALead, n), None, 1000, 42).unwrap();
    print!("{report}");
}
