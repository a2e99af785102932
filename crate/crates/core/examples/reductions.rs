//! Leader election ↔ coin toss, exactly and by sampling.

use fairring::harness::{run_trials, RunConfig};
use fairring::protocols::ProtocolKind;
use fairring::reductions::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let eps = ratio(1, 100);
    let probs = (0..8).map(|j| if j % 2 == 0 { ratio(1, 8) + &eps } else { ratio(1, 8) - &eps }).collect();
    let fle = OutcomeDistribution::new(probs, ratio(0, 1)).unwrap();
    let coin = coin_from_fle_dist(&fle).unwrap();
    println!("parity coin: Pr(0) = {}, bias {} ≤ {}", coin.probs[0], coin.bias(), coin_from_fle_bound(8, &eps));

    let c = OutcomeDistribution::new(vec![ratio(3, 5), ratio(2, 5)], ratio(0, 1)).unwrap();
    let lead = fle_from_coins_dist(&c, 4).unwrap();
    println!("two coins with Pr(0) = 3/5: leaders {:?}", lead.probs.iter().map(|p| p.to_string()).collect::<Vec<_>>());
    println!("bit consensus, n = 16, k = 2, ε = 1/100: bias ≤ {}", coin_from_bit_consensus_bound(16, 2, &eps));

    // the parity of a simulated honest election
    let r = run_trials(&RunConfig::new(ProtocolKind::ALead, 8), None, 4000, 9).unwrap();
    let live = coin_from_fle_dist(&OutcomeDistribution::from_counts(&r.histogram, 0).unwrap()).unwrap();
    println!("A-LEAD parity over 4000 runs: Pr(0) ≈ {:.4}", to_f64(&live.probs[0]));

    let mut coin = BiasedCoin { p0: 0.6, rng: ChaCha8Rng::seed_from_u64(1) };
    let hits = (0..10_000).filter(|_| fle_from_coins(&mut coin, 4).unwrap().elected() == Some(0)).count();
    println!("sampled Pr(leader 0) ≈ {:.4} (exact 0.36)", hits as f64 / 10_000.0);
}
