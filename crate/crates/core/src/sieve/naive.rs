//! Brute-force recomputations of every block statistic, used as oracles for
//! the sieved fast paths.  All of them scan the block integer by integer
//! with trial division, so keep `b^λ` small (≤ 10^5 or so).

use super::block::BlockCensus;
use crate::fourier::{gcd_u64, rev_u64};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn block_range(b: u32, lambda: u32) -> (u64, u64) {
    let lo = u64::from(b).pow(lambda - 1);
    (lo, lo * u64::from(b))
}

pub fn pi_lambda(b: u32, lambda: u32, t: u64) -> u64 {
    let (lo, _) = block_range(b, lambda);
    (lo..t).filter(|&n| is_prime(n)).count() as u64
}

pub fn pimirror(b: u32, lambda: u32, t: u64, a: u64, d: u64) -> u64 {
    let (lo, _) = block_range(b, lambda);
    (lo..t)
        .filter(|&n| is_prime(n) && rev_u64(n, u64::from(b), lambda) % d == a % d)
        .count() as u64
}

pub fn t_count(b: u32, lambda: u32, i: u32, d: u64) -> u64 {
    let (lo, _) = block_range(b, lambda);
    (lo * u64::from(i)..lo * (u64::from(i) + 1))
        .filter(|&n| is_prime(n) && rev_u64(n, u64::from(b), lambda) % d == 0)
        .count() as u64
}

fn big_omega(mut n: u64) -> u32 {
    let mut count = 0;
    let mut d = 2;
    while d * d <= n {
        while n % d == 0 {
            n /= d;
            count += 1;
        }
        d += 1;
    }
    if n > 1 {
        count += 1;
    }
    count
}

fn p_minus(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

pub fn theta(b: u32, lambda: u32, i: u32, z: u64) -> u64 {
    let (lo, _) = block_range(b, lambda);
    (lo * u64::from(i)..lo * (u64::from(i) + 1))
        .filter(|&n| {
            is_prime(n) && {
                let r = rev_u64(n, u64::from(b), lambda);
                r >= 2 && p_minus(r) >= z
            }
        })
        .count() as u64
}

pub fn census(b: u32, lambda: u32, omega_max: Option<u32>, z: u64) -> Vec<BlockCensus> {
    let (lo, _) = block_range(b, lambda);
    (1..b)
        .map(|i| {
            let mut cell = BlockCensus {
                i,
                coprime_class: gcd_u64(u64::from(i), u64::from(b)) == 1,
                primes: 0,
                reversible: 0,
                omega_le: 0,
                pminus_ge: 0,
                both: 0,
            };
            for n in lo * u64::from(i)..lo * (u64::from(i) + 1) {
                if !is_prime(n) {
                    continue;
                }
                cell.primes += 1;
                let r = rev_u64(n, u64::from(b), lambda);
                if is_prime(r) {
                    cell.reversible += 1;
                }
                let om_ok = omega_max.map_or(true, |m| big_omega(r) <= m);
                let pm_ok = r >= 2 && p_minus(r) >= z;
                if om_ok {
                    cell.omega_le += 1;
                }
                if pm_ok {
                    cell.pminus_ge += 1;
                }
                if om_ok && pm_ok {
                    cell.both += 1;
                }
            }
            cell
        })
        .collect()
}

/// Exact `max_{k,a} |d·count_a(k) − k|` by the quadratic-time definition.
pub fn sup_deviation_numerator(b: u32, lambda: u32, d: u64) -> u64 {
    let (lo, hi) = block_range(b, lambda);
    let mut counts = vec![0u64; d as usize];
    let mut k = 0u64;
    let mut best = 0u64;
    for n in lo..hi {
        if !is_prime(n) {
            continue;
        }
        let a = (rev_u64(n, u64::from(b), lambda) % d) as usize;
        counts[a] += 1;
        k += 1;
        for &c in &counts {
            best = best.max((d * c).abs_diff(k));
        }
    }
    best
}

/// Sum over admissible 2 ≤ d ≤ D of the exact supremum deviation.
pub fn bv_total(b: u32, lambda: u32, d_max: u64) -> f64 {
    let base = u64::from(b);
    let forced = base * (base * base - 1);
    (2..=d_max)
        .filter(|&d| gcd_u64(d, forced) == 1)
        .map(|d| sup_deviation_numerator(b, lambda, d) as f64 / d as f64)
        .sum()
}
