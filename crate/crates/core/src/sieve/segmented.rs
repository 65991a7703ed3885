//! Segmented sieve of Eratosthenes with 2^20-element segments.

use rayon::prelude::*;

pub const SEGMENT_SIZE: u64 = 1 << 20;

/// Simple sieve: all primes `≤ limit`.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn sieve_segment(seg_lo: u64, seg_hi: u64, base_primes: &[u64]) -> Vec<u64> {
    let len = (seg_hi - seg_lo) as usize;
    let mut composite = vec![false; len];
    for &p in base_primes {
        if p * p >= seg_hi {
            break;
        }
        let mut start = (seg_lo + p - 1) / p * p;
        if start < p * p {
            start = p * p;
        }
        let mut j = start;
        while j < seg_hi {
            composite[(j - seg_lo) as usize] = true;
            j += p;
        }
    }
    let mut out = Vec::new();
    for (off, &c) in composite.iter().enumerate() {
        if !c {
            let n = seg_lo + off as u64;
            if n >= 2 {
                out.push(n);
            }
        }
    }
    out
}

/// All primes in `[lo, hi)`, segments sieved in parallel and concatenated
/// in order.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi <= lo.max(2) && hi <= 2 {
        return Vec::new();
    }
    let lo = lo.max(2);
    if hi <= lo {
        return Vec::new();
    }
    let root = (hi as f64).sqrt() as u64 + 2;
    let base_primes = small_primes(root);
    let n_segments = (hi - lo).div_ceil(SEGMENT_SIZE);
    let chunks: Vec<Vec<u64>> = (0..n_segments)
        .into_par_iter()
        .map(|s| {
            let seg_lo = lo + s * SEGMENT_SIZE;
            let seg_hi = (seg_lo + SEGMENT_SIZE).min(hi);
            sieve_segment(seg_lo, seg_hi, &base_primes)
        })
        .collect();
    let mut out = Vec::with_capacity(chunks.iter().map(Vec::len).sum());
    for c in chunks {
        out.extend(c);
    }
    out
}

/// Stream every prime in `[lo, hi)` to `f` in increasing order, one segment
/// at a time (memory stays at segment size).
pub fn for_each_prime(lo: u64, hi: u64, mut f: impl FnMut(u64)) {
    let lo = lo.max(2);
    if hi <= lo {
        return;
    }
    let root = (hi as f64).sqrt() as u64 + 2;
    let base_primes = small_primes(root);
    let mut seg_lo = lo;
    while seg_lo < hi {
        let seg_hi = (seg_lo + SEGMENT_SIZE).min(hi);
        for p in sieve_segment(seg_lo, seg_hi, &base_primes) {
            f(p);
        }
        seg_lo = seg_hi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes_counts() {
        assert_eq!(small_primes(100).len(), 25);
        assert_eq!(small_primes(1).len(), 0);
        assert_eq!(small_primes(2), vec![2]);
    }

    #[test]
    fn range_matches_simple() {
        let all = small_primes(50_000);
        let ranged = primes_in_range(0, 50_001);
        assert_eq!(all, ranged);
        let mid: Vec<u64> = all.iter().copied().filter(|&p| (100..1000).contains(&p)).collect();
        assert_eq!(mid, primes_in_range(100, 1000));
    }

    #[test]
    fn range_spanning_segments() {
        // π(3·10^6) − π(10^6) = 216816 − 78498.
        let v = primes_in_range(1_000_000, 3_000_000);
        assert_eq!(v.len(), 216_816 - 78_498);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn streaming_matches_collected() {
        let mut streamed = Vec::new();
        for_each_prime(500, 40_000, |p| streamed.push(p));
        assert_eq!(streamed, primes_in_range(500, 40_000));
    }

    #[test]
    fn empty_ranges() {
        assert!(primes_in_range(10, 10).is_empty());
        assert!(primes_in_range(0, 2).is_empty());
        assert_eq!(primes_in_range(0, 3), vec![2]);
    }
}
