//! Uniformity statistics of honest runs, with a grid over n and both schedules.

use fairring::harness::{binomial_band, run_trials, RunConfig, TrialReport};
use fairring::protocols::{PhaseParams, ProtocolKind};
use fairring::ring::Schedule;

fn main() {
    println!("{}", TrialReport::SUMMARY_HEADER);
    for protocol in [ProtocolKind::Basic, ProtocolKind::ALead, ProtocolKind::Phase] {
        for n in [4, 16] {
            for schedule in [Schedule::RoundRobin, Schedule::Random] {
                let cfg = RunConfig::new(protocol, n)
                    .with_params(PhaseParams { l: n / 4, ..PhaseParams::defaults(n, 5) })
                    .with_schedule(schedule);
                println!("{}", run_trials(&cfg, None, 20_000, 7).unwrap().summary_row());
            }
        }
    }
    let (lo, hi) = binomial_band(1.0 / 16.0, 20_000, 5.0);
    println!("5σ band for n = 16: [{lo:.4}, {hi:.4}]");
}
