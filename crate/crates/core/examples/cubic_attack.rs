//! The cubic attack: k ≈ 2∛n adversaries at shrinking distances.

use fairring::attacks::{cubic_distances, AttackKind, AttackSpec};
use fairring::harness::{run_trial, run_trials, RunConfig};
use fairring::oracle::validate_execution;
use fairring::protocols::ProtocolKind;

fn main() {
    for (k, n) in [(3, 15), (2, 5), (4, 34), (5, 60)] {
        println!("k = {k}, n = {n}: distances {:?}", cubic_distances(k, n).unwrap());
    }
    println!("k = 3, n = 100: {}", cubic_distances(3, 100).unwrap_err());

    let cfg = RunConfig::new(ProtocolKind::ALead, 15);
    let spec = AttackSpec::new(AttackKind::Cubic, 11).with_k(3);
    let trial = run_trial(&cfg, Some(&spec), 5, 0, true).unwrap();
    let t = trial.execution.transcript.as_ref().unwrap();
    println!("coalition {:?}: {}, oracle says {:?}", trial.coalition, trial.outcome, validate_execution(t, &trial.coalition, 15).unwrap());

    let cfg = RunConfig::new(ProtocolKind::ALead, 60);
    let r = run_trials(&cfg, Some(&AttackSpec::new(AttackKind::Cubic, 0).with_k(5)), 500, 2).unwrap();
    println!("n = 60, k = 5: success {:.3}", r.success_rate.unwrap());
}
