use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("histogram has no valid outcomes")]
    Empty,
    #[error("histogram has {got} bins, expected {expected}")]
    Bins { expected: usize, got: usize },
}

fn check(hist: &[u64], n: usize) -> Result<u64, StatsError> {
    if hist.len() != n {
        return Err(StatsError::Bins { expected: n, got: hist.len() });
    }
    match hist.iter().sum::<u64>() {
        0 => Err(StatsError::Empty),
        total => Ok(total),
    }
}

/// Total-variation distance between the histogram (as a distribution over
/// `[0, n)`) and uniform. Failures are not part of `hist`.
pub fn tv_distance(hist: &[u64], n: usize) -> Result<f64, StatsError> {
    let total = check(hist, n)? as f64;
    let u = 1.0 / n as f64;
    Ok(0.5 * hist.iter().map(|&c| (c as f64 / total - u).abs()).sum::<f64>())
}

/// Pearson goodness-of-fit p-value against uniform.
pub fn chi_square_p(hist: &[u64], n: usize) -> Result<f64, StatsError> {
    let total = check(hist, n)? as f64;
    if n < 2 {
        return Ok(1.0);
    }
    let e = total / n as f64;
    let stat: f64 = hist.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let dist = ChiSquared::new((n - 1) as f64).expect("positive degrees of freedom");
    Ok(1.0 - dist.cdf(stat))
}

/// `p ± sigmas·√(p(1−p)/trials)`.
pub fn binomial_band(p: f64, trials: u64, sigmas: f64) -> (f64, f64) {
    let half = sigmas * (p * (1.0 - p) / trials as f64).sqrt();
    (p - half, p + half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[5, 5, 5, 5], 4).unwrap(), 0.0);
        assert!((tv_distance(&[9, 0, 0, 0], 4).unwrap() - 0.75).abs() < 1e-12);
        assert!((tv_distance(&[3, 1, 0, 0], 4).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(tv_distance(&[0, 0], 2), Err(StatsError::Empty));
    }

    #[test]
    fn chi_square_flat_is_one() {
        assert!((chi_square_p(&[10, 10, 10], 3).unwrap() - 1.0).abs() < 1e-12);
        assert!(chi_square_p(&[100, 0, 0], 3).unwrap() < 1e-6);
    }
}
