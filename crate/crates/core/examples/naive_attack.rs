//! k ≈ √n equally spaced pipes against A-LEAD^uni.

use fairring::attacks::{segments, AttackKind, AttackSpec};
use fairring::harness::{run_trials, RunConfig};
use fairring::protocols::ProtocolKind;

fn main() {
    let n = 9;
    let coalition = [0, 3, 6];
    for s in segments(n, &coalition) {
        println!("adversary {} guards {:?}", s.adversary, s.members);
    }
    let cfg = RunConfig::new(ProtocolKind::ALead, n).with_oracle(true);
    let spec = AttackSpec::new(AttackKind::Naive, 7).at(&coalition);
    print!("{}", run_trials(&cfg, Some(&spec), 200, 1).unwrap());

    // a segment longer than k − 1 cannot be covered
    let bad = AttackSpec::new(AttackKind::Naive, 7).at(&[0, 1, 2]);
    println!("{{0,1,2}}: {}", run_trials(&cfg, Some(&bad), 1, 1).unwrap_err());
}
