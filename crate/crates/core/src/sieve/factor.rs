//! Smallest-prime-factor table and the multiplicative functions derived
//! from it: `μ`, `Λ`, `τ`, `ω`, `Ω`, `P⁻`, `v_p`.

use super::{budget_check, SieveError};

/// Full factorization needs the table down to 1, so the range always
/// starts at 0; `hi` is capped to keep the table at a few hundred MiB.
pub const FACTOR_SIEVE_CAP: u64 = 100_000_000;

/// Smallest-prime-factor table for `[0, hi)`.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    hi: u64,
    /// `spf[n]` = smallest prime factor of `n`; 0 marks 0, 1 and primes.
    spf: Vec<u32>,
}

impl FactorSieve {
    pub fn new(hi: u64) -> Result<Self, SieveError> {
        budget_check(u128::from(hi))?;
        if hi > FACTOR_SIEVE_CAP {
            return Err(SieveError::BudgetExceeded {
                hi: u128::from(hi),
                budget: FACTOR_SIEVE_CAP,
                est_mib: hi * 4 / (1 << 20),
            });
        }
        let n = hi as usize;
        let mut spf = vec![0u32; n];
        let mut p = 2usize;
        while p * p < n {
            if spf[p] == 0 {
                let mut j = p * p;
                while j < n {
                    if spf[j] == 0 {
                        spf[j] = p as u32;
                    }
                    j += p;
                }
            }
            p += 1;
        }
        Ok(FactorSieve { hi, spf })
    }

    pub fn lo(&self) -> u64 {
        0
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Smallest prime factor of `n ≥ 2`.
    pub fn smallest_factor(&self, n: u64) -> u64 {
        debug_assert!((2..self.hi).contains(&n));
        let s = self.spf[n as usize];
        if s == 0 {
            n
        } else {
            u64::from(s)
        }
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] == 0
    }

    /// `(p, v_p(n))` pairs in increasing `p`.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        debug_assert!(n < self.hi);
        let mut out = Vec::new();
        while n >= 2 {
            let p = self.smallest_factor(n);
            let mut v = 0;
            while n % p == 0 {
                n /= p;
                v += 1;
            }
            out.push((p, v));
        }
        out
    }

    /// Möbius function.
    pub fn mu(&self, n: u64) -> i32 {
        if n == 0 {
            return 0;
        }
        let mut m = n;
        let mut sign = 1;
        while m >= 2 {
            let p = self.smallest_factor(m);
            m /= p;
            if m % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        sign
    }

    /// Von Mangoldt function: `log p` when `n = p^k`, else 0.
    pub fn von_mangoldt(&self, n: u64) -> f64 {
        if n < 2 {
            return 0.0;
        }
        let p = self.smallest_factor(n);
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        if m == 1 {
            (p as f64).ln()
        } else {
            0.0
        }
    }

    /// Number of divisors.
    pub fn tau(&self, n: u64) -> u64 {
        self.factorize(n)
            .iter()
            .map(|&(_, v)| u64::from(v) + 1)
            .product()
    }

    /// Number of distinct prime factors.
    pub fn omega(&self, n: u64) -> u32 {
        self.factorize(n).len() as u32
    }

    /// Number of prime factors with multiplicity.
    pub fn big_omega(&self, n: u64) -> u32 {
        self.factorize(n).iter().map(|&(_, v)| v).sum()
    }

    /// `P⁻(n)`, smallest prime factor of `n ≥ 2`.
    pub fn p_minus(&self, n: u64) -> u64 {
        self.smallest_factor(n)
    }

    /// `v_p(n)`, the p-adic valuation.
    pub fn valuation(&self, p: u64, mut n: u64) -> u32 {
        let mut v = 0;
        while n >= p && n % p == 0 {
            n /= p;
            v += 1;
        }
        v
    }
}
