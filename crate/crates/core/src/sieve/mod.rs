//! Segmented prime/factor sieving and the counting statistics over blocks
//! of primes: `π_λ`, mirrored counts, congruence deviations, almost-prime
//! and reversible-prime censuses.

mod block;
mod cache;
mod factor;
pub mod naive;
mod primality;
mod segmented;

pub use block::{BlockCensus, BvReport, CongruenceDeviation, PrimeBlock};
pub use cache::{read_prime_cache, write_prime_cache, CACHE_MAGIC};
pub use factor::FactorSieve;
pub use primality::is_prime_u64;
pub use segmented::{for_each_prime, primes_in_range, small_primes};

use crate::digits::{Base, DigitsError};
use crate::fourier::gcd_u64;

/// Largest sievable upper bound (`b^λ ≤ 2·10^9`).
pub const SIEVE_BUDGET: u64 = 2_000_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SieveError {
    #[error(
        "range up to {hi} exceeds the sieve budget {budget}; sieving it would need \
         roughly {est_mib} MiB for the prime list"
    )]
    BudgetExceeded { hi: u128, budget: u64, est_mib: u64 },
    #[error("leading-digit class {i} out of range 1..{b}")]
    InvalidClass { i: u32, b: u32 },
    #[error("modulus must be >= 1")]
    ZeroModulus,
    #[error("t = {t} outside [b^(λ−1), b^λ] = [{lo}, {hi}]")]
    OutOfBlock { t: u64, lo: u64, hi: u64 },
    #[error(transparent)]
    Digits(#[from] DigitsError),
    #[error("cache i/o: {0}")]
    Cache(String),
}

pub(crate) fn budget_check(hi: u128) -> Result<u64, SieveError> {
    if hi > u128::from(SIEVE_BUDGET) {
        // ~ hi / ln(hi) primes at 8 bytes each.
        let est = (hi as f64 / (hi as f64).ln() * 8.0 / (1 << 20) as f64) as u64;
        return Err(SieveError::BudgetExceeded {
            hi,
            budget: SIEVE_BUDGET,
            est_mib: est,
        });
    }
    Ok(hi as u64)
}

/// Exact rational `num/den`, used to keep `E_{λ,i}(d) = T − g(d)|𝒫|` exact
/// until the final real conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: i128,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0);
        Ratio { num, den }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }
}

/// `Π_d(b) = gcd(d, b²−1) · Π_{p|b} p^{v_p(d)}`.
pub fn pi_d_b(base: Base, d: u64) -> u64 {
    assert!(d >= 1);
    let b = base.as_u64();
    let mut out = gcd_u64(d, b * b - 1);
    let mut rem_b = b;
    let mut p = 2u64;
    while p * p <= rem_b {
        if rem_b % p == 0 {
            while rem_b % p == 0 {
                rem_b /= p;
            }
            let mut dd = d;
            while dd % p == 0 {
                out *= p;
                dd /= p;
            }
        }
        p += 1;
    }
    if rem_b > 1 {
        let p = rem_b;
        let mut dd = d;
        while dd % p == 0 {
            out *= p;
            dd /= p;
        }
    }
    out
}

/// The multiplicative density `g(d)`: `1/d` when `gcd(d, b(b²−1)) = 1`,
/// else 0.
pub fn little_g(base: Base, d: u64) -> Ratio {
    assert!(d >= 1);
    if gcd_u64(d, base.forced_modulus()) == 1 {
        Ratio::new(1, d)
    } else {
        Ratio::new(0, 1)
    }
}

/// `V(z) = Π_{p<z, p∤b(b²−1)} (1 − 1/p)`, an exact product over the sieved
/// primes.
pub fn mertens_v(base: Base, z: u64) -> Result<f64, SieveError> {
    budget_check(u128::from(z))?;
    let forced = base.forced_modulus();
    let mut v = 1.0f64;
    for_each_prime(2, z, |p| {
        if forced % p != 0 {
            v *= 1.0 - 1.0 / p as f64;
        }
    });
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u32) -> Base {
        Base::new(n).unwrap()
    }

    #[test]
    fn pi_d_b_examples() {
        // gcd(d, b(b²−1)) = 1 → 1
        assert_eq!(pi_d_b(b(10), 7), 1);
        assert_eq!(pi_d_b(b(2), 7), 1);
        // (b=10, d=18) → gcd(18,99)·2^{v₂(18)} = 9·2 = 18
        assert_eq!(pi_d_b(b(10), 18), 18);
        assert_eq!(pi_d_b(b(10), 1), 1);
        assert_eq!(pi_d_b(b(6), 12), 3 * 4); // gcd(12,35)=1, 2²·3 | 12 → 4·3
    }

    #[test]
    fn little_g_examples() {
        assert_eq!(little_g(b(10), 7), Ratio::new(1, 7));
        assert!(little_g(b(10), 3).is_zero()); // 3 | 99
        assert!(little_g(b(2), 12).is_zero()); // 2 | b
    }

    #[test]
    fn mertens_examples() {
        // z=3, b=10: p=2 divides 990 → empty product → 1.
        assert_eq!(mertens_v(b(10), 3).unwrap(), 1.0);
        // z=8, b=10: only 7 ∤ 990 among {2,3,5,7} → 6/7.
        assert!((mertens_v(b(10), 8).unwrap() - 6.0 / 7.0).abs() < 1e-15);
        // Non-increasing in z.
        let v1 = mertens_v(b(10), 100).unwrap();
        let v2 = mertens_v(b(10), 1000).unwrap();
        assert!(v2 <= v1);
    }

    #[test]
    fn budget_rejected() {
        let e = budget_check(u128::from(SIEVE_BUDGET) + 1).unwrap_err();
        assert!(matches!(e, SieveError::BudgetExceeded { .. }));
        assert!(e.to_string().contains("MiB"));
    }
}
