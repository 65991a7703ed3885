//! Base-`b` digit expansions, the reversal map `R_λ` and torus arithmetic.
//!
//! An integer `n ≥ 0` is written `n = Σ_{j≥0} ε_j(n) b^j` with digits
//! `ε_j(n) ∈ {0, …, b−1}`.  The reverse of the `λ` lowest digits is
//! `R_λ(n) = Σ_{j<λ} ε_j(n) b^{λ−1−j}`, with `R_0(n) = 0`.

use std::f64::consts::TAU;

use crate::Complex;

/// Values this close to an integer are snapped to it by [`torus_norm`].
/// Stabilizes downstream divisions by `sin(π‖x‖)`.
pub const TORUS_SNAP: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DigitsError {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),
    #[error("{base}^{lambda} does not fit in 128 bits")]
    RangeOverflow { base: u32, lambda: u32 },
}

/// The base of all digit expansions; always at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Base(u32);

impl Base {
    pub fn new(b: u32) -> Result<Self, DigitsError> {
        if b < 2 {
            return Err(DigitsError::InvalidBase(b));
        }
        Ok(Base(b))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_u64(self) -> u64 {
        u64::from(self.0)
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    /// `b^λ` as `u128`, or an overflow error.
    pub fn pow(self, lambda: u32) -> Result<u128, DigitsError> {
        let mut acc: u128 = 1;
        for _ in 0..lambda {
            acc = acc
                .checked_mul(u128::from(self.0))
                .ok_or(DigitsError::RangeOverflow {
                    base: self.0,
                    lambda,
                })?;
        }
        Ok(acc)
    }

    /// `b^λ` when it fits in a `u64`.
    pub fn pow_u64(self, lambda: u32) -> Result<u64, DigitsError> {
        let v = self.pow(lambda)?;
        u64::try_from(v).map_err(|_| DigitsError::RangeOverflow {
            base: self.0,
            lambda,
        })
    }

    /// `b(b²−1)`, the modulus tying `n` to its reverse.
    pub fn forced_modulus(self) -> u64 {
        let b = self.as_u64();
        b * (b * b - 1)
    }
}

impl std::fmt::Display for Base {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The `λ` lowest base-`b` digits of an integer, least significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitExpansion {
    base: Base,
    digits: Vec<u32>,
}

impl DigitExpansion {
    pub fn base(&self) -> Base {
        self.base
    }

    /// `λ`, the number of stored digits.
    pub fn len(&self) -> u32 {
        self.digits.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digits `ε_0, …, ε_{λ−1}`.
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// `Σ_{j<λ} ε_j b^j`.
    pub fn value(&self) -> u128 {
        let b = u128::from(self.base.0);
        self.digits
            .iter()
            .rev()
            .fold(0u128, |acc, &d| acc * b + u128::from(d))
    }
}

/// The `λ` lowest base-`b` digits of `n`; digits beyond position `λ` are
/// discarded.
pub fn expand(n: u128, base: Base, lambda: u32) -> Result<DigitExpansion, DigitsError> {
    base.pow(lambda)?;
    let b = u128::from(base.0);
    let mut digits = Vec::with_capacity(lambda as usize);
    let mut m = n;
    for _ in 0..lambda {
        digits.push((m % b) as u32);
        m /= b;
    }
    Ok(DigitExpansion { base, digits })
}

/// `R_λ(n) = Σ_{j<λ} ε_j(n) b^{λ−1−j}`, the reverse of the `λ` lowest
/// digits; `R_0(n) = 0`.
pub fn reverse(n: u128, base: Base, lambda: u32) -> Result<u128, DigitsError> {
    base.pow(lambda)?;
    let b = u128::from(base.0);
    let mut m = n;
    let mut rev: u128 = 0;
    for _ in 0..lambda {
        rev = rev * b + m % b;
        m /= b;
    }
    Ok(rev)
}

/// Number of base-`b` digits of `n ≥ 1` (the least `λ` with `n < b^λ`).
pub fn digit_length(n: u128, base: Base) -> u32 {
    let b = u128::from(base.0);
    let mut len = 0;
    let mut m = n;
    while m > 0 {
        m /= b;
        len += 1;
    }
    len
}

/// Whether `n ≥ 1` equals its own reverse in base `b`.
pub fn is_palindrome(n: u128, base: Base) -> bool {
    assert!(n >= 1, "palindrome test requires n >= 1");
    let b = u128::from(base.0);
    let mut digits = Vec::new();
    let mut m = n;
    while m > 0 {
        digits.push(m % b);
        m /= b;
    }
    let k = digits.len();
    (0..k / 2).all(|j| digits[j] == digits[k - 1 - j])
}

/// `‖x‖`, the distance from `x` to the nearest integer, in `[0, 1/2]`.
///
/// Values within [`TORUS_SNAP`] of an integer return exactly 0.
pub fn torus_norm(x: f64) -> f64 {
    assert!(x.is_finite(), "torus_norm requires finite input, got {x}");
    let d = (x - x.round()).abs();
    if d < TORUS_SNAP {
        0.0
    } else {
        d
    }
}

/// Signed fractional part `x − round(x) ∈ [−1/2, 1/2]`.
///
/// Exact for every finite `f64`: the subtraction is lossless by Sterbenz'
/// lemma.
#[inline]
pub fn frac(x: f64) -> f64 {
    x - x.round()
}

/// `frac(a·m)` computed with a two-product so the result is accurate to a
/// few ulp even when `a·m` is large (arguments like `α b^j` reach `10^12`
/// and a plain product would lose the fractional part).
///
/// Requires `m` to be exactly representable (integers below `2^53`).
#[inline]
pub fn frac_mul(a: f64, m: f64) -> f64 {
    let p = a * m;
    let e = a.mul_add(m, -p);
    (p - p.round()) + e
}

/// `e(x) = exp(2πi x)`, evaluated from the fractional part of `x`.
pub fn unit_exp(x: f64) -> Complex {
    assert!(x.is_finite(), "unit_exp requires finite input, got {x}");
    let t = TAU * frac(x);
    Complex::new(t.cos(), t.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(n: u32) -> Base {
        Base::new(n).unwrap()
    }

    #[test]
    fn base_rejects_small() {
        assert!(Base::new(0).is_err());
        assert!(Base::new(1).is_err());
        assert!(Base::new(2).is_ok());
    }

    #[test]
    fn expand_examples() {
        assert_eq!(expand(123, b(10), 3).unwrap().digits(), &[3, 2, 1]);
        assert_eq!(expand(0, b(2), 4).unwrap().digits(), &[0, 0, 0, 0]);
        // b^λ truncates to λ digits.
        assert_eq!(expand(9, b(3), 2).unwrap().digits(), &[0, 0]);
        assert_eq!(expand(123, b(10), 3).unwrap().value(), 123);
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(reverse(123, b(10), 3).unwrap(), 321);
        // Leading zero appears after reversal.
        assert_eq!(reverse(120, b(10), 3).unwrap(), 21);
        // R_0(n) = 0 by convention.
        assert_eq!(reverse(123, b(10), 0).unwrap(), 0);
    }

    #[test]
    fn reverse_overflow_rejected() {
        assert!(matches!(
            reverse(1, b(10), 40),
            Err(DigitsError::RangeOverflow { .. })
        ));
    }

    #[test]
    fn palindrome_examples() {
        assert!(is_palindrome(12321, b(10)));
        assert!(!is_palindrome(10, b(10)));
        assert!(is_palindrome(5, b(2))); // 101 in base 2
        assert!(is_palindrome(7, b(10)));
    }

    #[test]
    fn torus_norm_examples() {
        assert_eq!(torus_norm(0.75), 0.25);
        assert_eq!(torus_norm(3.0), 0.0);
        assert_eq!(torus_norm(-0.4), 0.4);
        assert_eq!(torus_norm(5.0 - 1e-16), 0.0);
    }

    #[test]
    fn unit_exp_examples() {
        let one = unit_exp(0.0);
        assert!((one.re - 1.0).abs() < 1e-15 && one.im.abs() < 1e-15);
        let minus_one = unit_exp(0.5);
        assert!((minus_one.re + 1.0).abs() < 1e-15 && minus_one.im.abs() < 1e-15);
        let i = unit_exp(0.25);
        assert!(i.re.abs() < 1e-15 && (i.im - 1.0).abs() < 1e-15);
    }

    #[test]
    fn frac_mul_accuracy() {
        // α b^j with a large power: compare against exact rational arithmetic.
        let d: u64 = 9973;
        let h: u64 = 1234;
        let alpha = h as f64 / d as f64;
        for j in 0..40u32 {
            let m = 2f64.powi(j as i32);
            // frac(h 2^j / d) = ((h 2^j) mod d)/d up to the f64 rounding of α
            let exact_num = (u128::from(h) << j) % u128::from(d);
            let mut exact = exact_num as f64 / d as f64;
            if exact > 0.5 {
                exact -= 1.0;
            }
            // α itself is rounded, so allow its propagated error.
            let err = (frac_mul(alpha, m) - exact).abs();
            let budget = m * f64::EPSILON + 1e-12;
            assert!(err < budget, "j={j}: err={err:.3e}");
        }
    }

    // Congruences R_λ(n) ≡ ε_{λ−1}(n) mod b, ≡ n mod (b−1), ≡ ±n mod (b+1),
    // exhaustively for small b, λ.
    #[test]
    fn reverse_congruences_exhaustive() {
        for bb in 2..=5u32 {
            let base = b(bb);
            for lambda in 1..=5u32 {
                let cap = base.pow(lambda).unwrap();
                for n in 0..cap {
                    let r = reverse(n, base, lambda).unwrap();
                    let top = expand(n, base, lambda).unwrap().digits()[lambda as usize - 1];
                    let m = u128::from(bb);
                    assert_eq!(r % m, u128::from(top) % m);
                    assert_eq!(r % (m - 1), n % (m - 1));
                    let mp = m + 1;
                    let sign_flip = (lambda - 1) % 2 == 1;
                    let rhs = if sign_flip { (mp - n % mp) % mp } else { n % mp };
                    assert_eq!(r % mp, rhs);
                }
            }
        }
    }

    // gcd(R_λ(p), b(b²−1)) = 1 for primes in blocks with gcd(i, b) = 1, λ ≥ 3.
    #[test]
    fn reverse_coprimality_on_prime_blocks() {
        fn gcd(mut a: u128, mut b: u128) -> u128 {
            while b != 0 {
                let t = a % b;
                a = b;
                b = t;
            }
            a
        }
        fn is_prime_small(n: u128) -> bool {
            if n < 2 {
                return false;
            }
            let mut d = 2u128;
            while d * d <= n {
                if n % d == 0 {
                    return false;
                }
                d += 1;
            }
            true
        }
        for bb in [2u32, 3, 10] {
            let base = b(bb);
            let lambda = 3u32;
            let bl = base.pow(lambda - 1).unwrap();
            for i in 1..bb {
                if gcd(u128::from(i), u128::from(bb)) != 1 {
                    continue;
                }
                for p in u128::from(i) * bl..(u128::from(i) + 1) * bl {
                    if !is_prime_small(p) {
                        continue;
                    }
                    let r = reverse(p, base, lambda).unwrap();
                    let modulus = u128::from(base.forced_modulus());
                    assert_eq!(gcd(r, modulus), 1, "b={bb} p={p} R={r}");
                }
            }
        }
    }

    proptest! {
        // Involution: reverse(reverse(n)) = n for n < b^λ.
        #[test]
        fn reverse_is_involution(bb in 2u32..12, lambda in 0u32..10, seed in any::<u64>()) {
            let base = Base::new(bb).unwrap();
            let cap = base.pow(lambda).unwrap();
            let n = if cap == 0 { 0 } else { u128::from(seed) % cap };
            let r = reverse(n, base, lambda).unwrap();
            prop_assert!(r < cap.max(1));
            prop_assert_eq!(reverse(r, base, lambda).unwrap(), n);
        }

        // Split law: R_λ(n₁ + b^{λ'} n₂) = b^{λ−λ'} R_{λ'}(n₁) + R_{λ−λ'}(n₂).
        #[test]
        fn reverse_split_law(bb in 2u32..5, lambda in 0u32..9, cut in 0u32..9, s1 in any::<u64>(), s2 in any::<u64>()) {
            let base = Base::new(bb).unwrap();
            let lambda_lo = cut.min(lambda);
            let p_lo = base.pow(lambda_lo).unwrap();
            let p_hi = base.pow(lambda - lambda_lo).unwrap();
            let n1 = u128::from(s1) % p_lo.max(1);
            let n2 = u128::from(s2) % p_hi.max(1);
            let n = n1 + p_lo * n2;
            let lhs = reverse(n, base, lambda).unwrap();
            let rhs = base.pow(lambda - lambda_lo).unwrap() * reverse(n1, base, lambda_lo).unwrap()
                + reverse(n2, base, lambda - lambda_lo).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn torus_norm_properties(x in -1e6f64..1e6) {
            let n = torus_norm(x);
            prop_assert!((0.0..=0.5).contains(&n));
            prop_assert!((torus_norm(-x) - n).abs() < 1e-9);
            prop_assert!((torus_norm(x + 1.0) - n).abs() < 1e-9);
        }

        #[test]
        fn unit_exp_modulus_one(x in -1e9f64..1e9) {
            prop_assert!((unit_exp(x).norm() - 1.0).abs() < 1e-12);
        }
    }
}
