//! Keyed stand-in for the shared random function `f`.
//!
//! `h₀ = mix(fseed ⊕ K_SEED)`, then for every input word `x` at position `i`
//! (d-values first, then v-values, with a domain tag between them):
//! `h ← mix(h ⊕ (x · K_WORD + i))`. Finally `h ← mix(h ⊕ len)` and the result
//! is mapped into `[0, n)` by the high half of `h · n`.
//! `mix` is the splitmix64 finalizer.

use thiserror::Error;

const K_SEED: u64 = 0x9E37_79B9_7F4A_7C15;
const K_WORD: u64 = 0xD6E8_FEB8_6659_FD93;
const K_TAG: u64 = 0xA076_1D64_78BD_642F;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArityError {
    #[error("expected {expected} data values, got {got}")]
    Data { expected: usize, got: usize },
    #[error("validation prefix of length {got} is not in [1, n) for n = {n}")]
    Validation { n: usize, got: usize },
}

#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Evaluate `f(d, v)` for a ring of size `n`. `v` holds the first `n − l` validation values.
pub fn f_eval(fseed: u64, d: &[u64], v: &[u64], n: usize) -> Result<u64, ArityError> {
    if d.len() != n {
        return Err(ArityError::Data { expected: n, got: d.len() });
    }
    if v.is_empty() || v.len() >= n {
        return Err(ArityError::Validation { n, got: v.len() });
    }
    Ok(f_unchecked(fseed, d, v, n))
}

pub(crate) fn f_unchecked(fseed: u64, d: &[u64], v: &[u64], n: usize) -> u64 {
    let mut h = mix(fseed ^ K_SEED);
    let mut i = 0u64;
    for &x in d {
        h = mix(h ^ x.wrapping_mul(K_WORD).wrapping_add(i));
        i += 1;
    }
    h = mix(h ^ K_TAG);
    for &x in v {
        h = mix(h ^ x.wrapping_mul(K_WORD).wrapping_add(i));
        i += 1;
    }
    h = mix(h ^ i);
    ((h as u128 * n as u128) >> 64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_checked() {
        assert!(matches!(f_eval(1, &[0; 3], &[0; 1], 4), Err(ArityError::Data { .. })));
        assert!(matches!(f_eval(1, &[0; 4], &[], 4), Err(ArityError::Validation { .. })));
        assert!(matches!(f_eval(1, &[0; 4], &[0; 4], 4), Err(ArityError::Validation { .. })));
        assert!(f_eval(1, &[0; 4], &[0; 3], 4).is_ok());
    }

    #[test]
    fn key_and_order_matter() {
        let d = [1, 2, 3, 4, 5, 6, 7, 0];
        let v = [9, 9, 9, 9, 9, 9];
        let a: Vec<u64> = (0..64).map(|s| f_eval(s, &d, &v, 8).unwrap()).collect();
        assert!(a.iter().any(|&x| x != a[0]));
    }
}
