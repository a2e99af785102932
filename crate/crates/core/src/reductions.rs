//! Reductions between leader election, coin tossing and bit consensus.
//!
//! Each reduction comes twice: as a sampler that composes live runners, and
//! as exact arithmetic on [`OutcomeDistribution`]s so bounds can be checked
//! without sampling noise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::ring::{FailReason, Outcome};

pub type Prob = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("coin from leader election needs even n, got {0}")]
    OddN(usize),
    #[error("leader election from coins needs n a power of two, got {0}")]
    NotPowerOfTwo(usize),
    #[error("not a distribution: {0}")]
    BadDistribution(String),
}

/// `num / den` as an exact probability.
pub fn ratio(num: i64, den: i64) -> Prob {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `a/b`, an integer or a finite decimal like `0.01` exactly.
pub fn parse_prob(s: &str) -> Result<Prob, ReductionError> {
    let bad = || ReductionError::BadDistribution(format!("cannot read `{s}` as a number"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32)))
}

/// Exact distribution over `[0, n)` plus a FAIL mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeDistribution {
    pub probs: Vec<Prob>,
    pub fail: Prob,
}

impl OutcomeDistribution {
    pub fn new(probs: Vec<Prob>, fail: Prob) -> Result<Self, ReductionError> {
        if probs.iter().chain([&fail]).any(|p| p.is_negative()) {
            return Err(ReductionError::BadDistribution("negative probability".into()));
        }
        let total: Prob = probs.iter().cloned().sum::<Prob>() + &fail;
        if !total.is_one() {
            return Err(ReductionError::BadDistribution(format!("mass sums to {total}")));
        }
        Ok(OutcomeDistribution { probs, fail })
    }

    pub fn uniform(n: usize) -> Self {
        OutcomeDistribution { probs: vec![ratio(1, n as i64); n], fail: Prob::zero() }
    }

    /// Point mass on `j`.
    pub fn point(n: usize, j: usize) -> Self {
        let mut probs = vec![Prob::zero(); n];
        probs[j] = Prob::one();
        OutcomeDistribution { probs, fail: Prob::zero() }
    }

    pub fn always_fail(n: usize) -> Self {
        OutcomeDistribution { probs: vec![Prob::zero(); n], fail: Prob::one() }
    }

    /// Empirical distribution of a histogram with `fails` failed trials.
    pub fn from_counts(hist: &[u64], fails: u64) -> Result<Self, ReductionError> {
        let total = hist.iter().sum::<u64>() + fails;
        if total == 0 {
            return Err(ReductionError::BadDistribution("no trials".into()));
        }
        let t = total as i64;
        Self::new(hist.iter().map(|&c| ratio(c as i64, t)).collect(), ratio(fails as i64, t))
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    /// `max_j Pr(j) − 1/n`.
    pub fn bias(&self) -> Prob {
        let max = self.probs.iter().max().cloned().unwrap_or_else(Prob::zero);
        max - ratio(1, self.n() as i64)
    }
}

pub fn to_f64(p: &Prob) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

/// Coin distribution (`[Pr 0, Pr 1]`) of the parity of the elected leader.
pub fn coin_from_fle_dist(fle: &OutcomeDistribution) -> Result<OutcomeDistribution, ReductionError> {
    let n = fle.n();
    if n % 2 != 0 {
        return Err(ReductionError::OddN(n));
    }
    let mut coin = vec![Prob::zero(), Prob::zero()];
    for (j, p) in fle.probs.iter().enumerate() {
        coin[j % 2] += p;
    }
    Ok(OutcomeDistribution { probs: coin, fail: fle.fail.clone() })
}

/// Bias bound of the parity coin: `(n/2)·ε`.
pub fn coin_from_fle_bound(n: usize, eps: &Prob) -> Prob {
    eps * ratio(n as i64 / 2, 1)
}

/// Leader distribution from `log₂ n` independent coins with the same law,
/// the first coin being the most significant bit.
pub fn fle_from_coins_dist(coin: &OutcomeDistribution, n: usize) -> Result<OutcomeDistribution, ReductionError> {
    if !n.is_power_of_two() || n < 2 {
        return Err(ReductionError::NotPowerOfTwo(n));
    }
    if coin.n() != 2 {
        return Err(ReductionError::BadDistribution("a coin has two outcomes".into()));
    }
    let bits = n.trailing_zeros();
    let probs = (0..n)
        .map(|x| {
            (0..bits).fold(Prob::one(), |acc, b| {
                let bit = (x >> (bits - 1 - b)) & 1;
                acc * &coin.probs[bit]
            })
        })
        .collect::<Vec<_>>();
    let ok: Prob = probs.iter().cloned().sum();
    Ok(OutcomeDistribution { probs, fail: Prob::one() - ok })
}

/// Bias bound of the concatenated election: `(1/2 + ε)^{log₂ n} − 1/n`.
pub fn fle_from_coins_bound(n: usize, eps: &Prob) -> Prob {
    let p = ratio(1, 2) + eps;
    let bits = n.trailing_zeros();
    (0..bits).fold(Prob::one(), |acc, _| acc * &p) - ratio(1, n as i64)
}

/// Bias bound for the coin built from bit consensus: `ε + 2^{k−n}`.
pub fn coin_from_bit_consensus_bound(n: usize, k: usize, eps: &Prob) -> Prob {
    let two = BigInt::from(2);
    let term = if k >= n {
        BigRational::from_integer(two.pow((k - n) as u32))
    } else {
        BigRational::new(BigInt::one(), two.pow((n - k) as u32))
    };
    eps + term
}

/// Utility over `[0, n)`; FAIL is worth 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UtilityFunction {
    pub u: Vec<Prob>,
}

impl UtilityFunction {
    pub fn new(u: Vec<Prob>) -> Result<Self, ReductionError> {
        if u.iter().any(|x| x.is_negative() || *x > Prob::one()) {
            return Err(ReductionError::BadDistribution("utility outside [0, 1]".into()));
        }
        Ok(UtilityFunction { u })
    }

    pub fn indicator(n: usize, j: usize) -> Self {
        let mut u = vec![Prob::zero(); n];
        u[j] = Prob::one();
        UtilityFunction { u }
    }
}

pub fn expected_utility(dist: &OutcomeDistribution, u: &UtilityFunction) -> Prob {
    dist.probs.iter().zip(&u.u).map(|(p, x)| p * x).sum()
}

/// Source of leader-election outcomes for the sampled reductions.
pub trait FleRunner {
    fn n(&self) -> usize;
    fn elect(&mut self) -> Outcome;
}

/// Source of coin outcomes (`Elected(0)` or `Elected(1)`).
pub trait CoinRunner {
    fn toss(&mut self) -> Outcome;
}

/// Fair bit consensus: given everyone's input bit, decide a common bit.
pub trait BitConsensus {
    fn decide(&mut self, inputs: &[bool]) -> Outcome;
}

/// Parity of an election.
pub struct CoinFromFle<F> {
    fle: F,
}

pub fn coin_from_fle<F: FleRunner>(fle: F) -> Result<CoinFromFle<F>, ReductionError> {
    if fle.n() % 2 != 0 {
        return Err(ReductionError::OddN(fle.n()));
    }
    Ok(CoinFromFle { fle })
}

impl<F: FleRunner> CoinRunner for CoinFromFle<F> {
    fn toss(&mut self) -> Outcome {
        match self.fle.elect() {
            Outcome::Elected(j) => Outcome::Elected(j % 2),
            fail => fail,
        }
    }
}

/// Concatenate `log₂ n` tosses, most significant first. Any failed toss fails.
pub fn fle_from_coins<C: CoinRunner>(coin: &mut C, n: usize) -> Result<Outcome, ReductionError> {
    if !n.is_power_of_two() || n < 2 {
        return Err(ReductionError::NotPowerOfTwo(n));
    }
    let mut x = 0u64;
    for _ in 0..n.trailing_zeros() {
        match coin.toss() {
            Outcome::Elected(b) => x = (x << 1) | (b & 1),
            fail => return Ok(fail),
        }
    }
    Ok(Outcome::Elected(x))
}

/// Every processor draws a uniform bit; the coalition (the first `k`)
/// submits `adversary_bit` instead. The consensus decision is the coin.
pub fn coin_from_bit_consensus<B: BitConsensus, R: Rng + ?Sized>(
    bc: &mut B,
    n: usize,
    k: usize,
    adversary_bit: bool,
    rng: &mut R,
) -> Outcome {
    let inputs: Vec<bool> = (0..n).map(|i| if i < k { adversary_bit } else { rng.gen() }).collect();
    bc.decide(&inputs)
}

/// Consensus that keeps a unanimous input and otherwise outputs 0 with
/// probability `1/2 + eps`.
pub struct BiasedConsensus<R> {
    pub eps: f64,
    pub rng: R,
}

impl<R: Rng> BitConsensus for BiasedConsensus<R> {
    fn decide(&mut self, inputs: &[bool]) -> Outcome {
        if inputs.iter().all(|&b| b == inputs[0]) {
            return Outcome::Elected(inputs[0] as u64);
        }
        Outcome::Elected(if self.rng.gen_bool(0.5 + self.eps) { 0 } else { 1 })
    }
}

/// Coin source with `Pr(0) = p0`.
pub struct BiasedCoin<R> {
    pub p0: f64,
    pub rng: R,
}

impl<R: Rng> CoinRunner for BiasedCoin<R> {
    fn toss(&mut self) -> Outcome {
        Outcome::Elected(if self.rng.gen_bool(self.p0) { 0 } else { 1 })
    }
}

/// Election that samples from a fixed distribution (f64 weights).
pub struct TableFle<R> {
    pub weights: Vec<f64>,
    pub fail: f64,
    pub rng: R,
}

impl<R: Rng> FleRunner for TableFle<R> {
    fn n(&self) -> usize {
        self.weights.len()
    }

    fn elect(&mut self) -> Outcome {
        let mut x: f64 = self.rng.gen();
        if x < self.fail {
            return Outcome::Fail(FailReason::Abort);
        }
        x -= self.fail;
        for (j, &w) in self.weights.iter().enumerate() {
            if x < w {
                return Outcome::Elected(j as u64);
            }
            x -= w;
        }
        Outcome::Elected(self.weights.len() as u64 - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_bias_is_exact() {
        let eps = ratio(1, 100);
        let n = 8;
        let probs = (0..n)
            .map(|j| if j % 2 == 0 { ratio(1, 8) + &eps } else { ratio(1, 8) - &eps })
            .collect();
        let fle = OutcomeDistribution::new(probs, Prob::zero()).unwrap();
        let coin = coin_from_fle_dist(&fle).unwrap();
        assert_eq!(coin.probs[0], ratio(1, 2) + ratio(4, 100));
        assert_eq!(coin.bias(), ratio(4, 100));
        assert_eq!(coin.bias(), coin_from_fle_bound(n, &eps));
    }

    #[test]
    fn coins_to_leader_product() {
        let coin = OutcomeDistribution::new(vec![ratio(3, 5), ratio(2, 5)], Prob::zero()).unwrap();
        let fle = fle_from_coins_dist(&coin, 4).unwrap();
        assert_eq!(fle.probs[0], ratio(9, 25));
        assert_eq!(fle.probs[3], ratio(4, 25));
        assert!(fle.fail.is_zero());
    }

    #[test]
    fn bounds() {
        assert_eq!(coin_from_bit_consensus_bound(4, 2, &Prob::zero()), ratio(1, 4));
        assert_eq!(fle_from_coins_bound(4, &Prob::zero()), Prob::zero());
        assert!(matches!(fle_from_coins_dist(&OutcomeDistribution::uniform(2), 6), Err(ReductionError::NotPowerOfTwo(6))));
        assert!(matches!(coin_from_fle_dist(&OutcomeDistribution::uniform(5)), Err(ReductionError::OddN(5))));
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_prob("0.01").unwrap(), ratio(1, 100));
        assert_eq!(parse_prob("3/5").unwrap(), ratio(3, 5));
        assert_eq!(parse_prob("2").unwrap(), ratio(2, 1));
        assert!(parse_prob("1/0").is_err() && parse_prob("x").is_err());
    }

    #[test]
    fn utility_examples() {
        let u = UtilityFunction::indicator(5, 2);
        assert_eq!(expected_utility(&OutcomeDistribution::uniform(5), &u), ratio(1, 5));
        assert!(expected_utility(&OutcomeDistribution::always_fail(5), &u).is_zero());
    }
}
