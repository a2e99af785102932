//! Location-oblivious adversaries that infer k from circularity.

use fairring::attacks::{AttackKind, AttackSpec, Placement};
use fairring::harness::{run_trials, RunConfig};
use fairring::protocols::ProtocolKind;

fn main() {
    for n in [256usize, 512, 1024] {
        let cfg = RunConfig::new(ProtocolKind::ALead, n);
        let p = (8.0 * (n as f64).ln() / n as f64).sqrt();
        let spec = AttackSpec::new(AttackKind::Random, 9).with_c(3).with_placement(Placement::Bernoulli { p });
        let r = run_trials(&cfg, Some(&spec), 200, n as u64).unwrap();
        println!("n = {n:>4}  p = {p:.3}  success {:.3}  failures {:?}", r.success_rate.unwrap(), r.failures);
    }
}
