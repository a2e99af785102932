//! A single processor fixes the Basic-LEAD leader by speaking last.

use fairring::attacks::{AttackKind, AttackSpec};
use fairring::harness::{run_trials, RunConfig};
use fairring::protocols::ProtocolKind;

fn main() {
    let cfg = RunConfig::new(ProtocolKind::Basic, 8);
    for w in [0, 3, 7] {
        let r = run_trials(&cfg, Some(&AttackSpec::new(AttackKind::Single, w)), 1000, w).unwrap();
        println!("target {w}: success {:.3}", r.success_rate.unwrap());
    }
}
