//! Why the output must be a random function: with a plain sum, four
//! adversaries share partial sums over the validation channel.

use fairring::attacks::{AttackKind, AttackSpec};
use fairring::harness::{run_trials, RunConfig};
use fairring::protocols::{PhaseParams, ProtocolKind};

fn main() {
    let n = 40;
    let params = PhaseParams { l: 4, m: 2 * 40 * 40, fseed: 0 };
    let sum = RunConfig::new(ProtocolKind::PhaseSum, n).with_params(params);
    let keyed = RunConfig::new(ProtocolKind::Phase, n).with_params(params);
    for w in [6, 27] {
        let r = run_trials(&sum, Some(&AttackSpec::new(AttackKind::SumAbuse, w)), 200, w).unwrap();
        println!("sum variant, target {w}: success {:.3}", r.success_rate.unwrap());
    }
    let honest = run_trials(&keyed, None, 2000, 3).unwrap();
    println!("keyed f, honest: tv to uniform {:.4}", honest.tv_distance.unwrap());
}
