//! Rushing adversaries against PhaseAsyncLead when l is small: each one
//! searches its free data slots for values that steer f.

use fairring::attacks::{rushing_positions, AttackKind, AttackSpec};
use fairring::harness::{run_trials, RunConfig};
use fairring::protocols::{PhaseParams, ProtocolKind};

fn main() {
    let (n, k, l) = (36, 9, 4);
    println!("coalition {:?}", rushing_positions(n, k, l));
    let cfg = RunConfig::new(ProtocolKind::Phase, n).with_params(PhaseParams { l, m: 2 * 36 * 36, fseed: 11 });
    let attacked = run_trials(&cfg, Some(&AttackSpec::new(AttackKind::PhaseRush, 0).with_k(k)), 200, 1).unwrap();
    let honest = run_trials(&cfg, None, 2000, 2).unwrap();
    println!(
        "Pr(leader 0): attacked {:.3}, honest {:.3}",
        attacked.success_rate.unwrap(),
        honest.histogram[0] as f64 / 2000.0
    );
}
