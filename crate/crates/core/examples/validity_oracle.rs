//! The transcript-only validity check against the simulator on random
//! deviations of A-LEAD^uni.

use fairring::harness::trial_rng;
use fairring::oracle::fuzz::{fuzz_case, run_case};
use fairring::ring::SimOptions;

fn main() {
    let mut agree = 0;
    for i in 0..12 {
        let mut rng = trial_rng(2024, i);
        let case = fuzz_case(6, &mut rng);
        let (label, coalition) = (case.label.clone(), case.coalition.clone());
        let r = run_case(case, &SimOptions::default()).unwrap();
        agree += r.agrees() as u32;
        println!("{coalition:?} {label}\n    verdict {:?}  honest outcome {}", r.verdict, r.honest);
    }
    println!("{agree}/12 agree");
}
