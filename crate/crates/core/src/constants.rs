//! The constant pipeline `η_b → κ_b → u_b, ι_b → ξ_0(b) → Ω_b, Ω̃_b`.
//!
//! `κ_b` is the smallest positive integer κ with
//! `b^{−ζ_{b,1}}·b^{1−ζ_{b,κ}} < 1`, i.e. `max T_{b,1} · b · max T_{b,κ} < 1`.
//! From it, `ι_b = u_b/(1+2(κ_b+1)u_b)` with
//! `u_b = (1−2η_b)/2 · log P⁻(b)/log b`, and
//! `ξ_0(b) = min((1−(1+2η_b)/2)/(2(3+4η_b)), u_b/(3(3−4u_b)),
//! ι_b/(3(1+6ι_b)), 1/33)`.  The admissible almost-primality levels are
//! `Ω_b = 1 + ⌈1/ξ_0(b)⌉` and `Ω̃_b = ⌊2/ξ_0(b)⌋`.

use rayon::prelude::*;

use crate::digits::{Base, DigitsError};
use crate::kernel::{self, KernelError};
use crate::numerics::{self, NumericsError, PredicateOutcome, QuadratureConfig};

/// Strict-inequality decisions whose certified interval clears the boundary
/// by less than this are routed to the warning channel.
pub const THRESHOLD_MARGIN: f64 = 1e-9;
/// Guard band for the ceiling/floor in `Ω_b`, `Ω̃_b`.
pub const CEILING_GUARD: f64 = 1e-9;
/// Upper limit of the κ search.
pub const KAPPA_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstantsError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Digits(#[from] DigitsError),
    #[error("R must be at least 2, got {0}")]
    InvalidR(u64),
    #[error("{quantity} = {value} is within {guard} of an integer; ceiling/floor is ambiguous")]
    CeilingAmbiguous {
        quantity: &'static str,
        value: f64,
        guard: f64,
    },
}

/// Per-base record of every constant in the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsRecord {
    pub base: Base,
    pub eta: f64,
    pub kappa_b: u64,
    pub zeta_1: f64,
    pub zeta_kappa: f64,
    /// `ε_b = ζ_{b,1} + ζ_{b,κ_b} − 1 > 0`.
    pub eps_b: f64,
    pub u_b: f64,
    pub iota_b: f64,
    pub xi0: f64,
    pub omega_b: u64,
    pub omega_tilde: u64,
    pub warnings: Vec<String>,
}

/// `Λ_R = R + log(3/4·(1+3^{−R}))/log 3 ∈ (R−1, R]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieveWeightConstant {
    pub r: u64,
    pub lambda_r: f64,
}

/// Smallest prime factor of `n ≥ 2` by trial division (bases are tiny).
pub fn smallest_prime_factor(n: u64) -> u64 {
    debug_assert!(n >= 2);
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

/// Result of the κ_b threshold search, with the certified margins at the
/// deciding values.
#[derive(Debug, Clone)]
pub struct KappaResult {
    pub kappa: u64,
    /// `1 − max T_{b,1}·b·max T_{b,κ_b}` (how strictly the condition holds).
    pub margin_at: f64,
    /// Margin recorded at `κ_b − 1` (condition fails there).
    pub margin_below: Option<f64>,
    pub warnings: Vec<String>,
}

/// `κ_b`: the least κ ∈ ℕ with `max T_{b,1} · b · max T_{b,κ} < 1`.
///
/// Each candidate is decided with certified maxima.  The certification
/// tolerance adapts: if the certified interval for the product straddles 1,
/// the maximum is recomputed at the full tolerance; if it still straddles
/// within [`THRESHOLD_MARGIN`], the candidate is treated as failing and a
/// warning records the straddle.
pub fn kappa_b(base: Base) -> Result<KappaResult, ConstantsError> {
    let m1 = kernel::max_t(base, 1.0)?;
    let b = base.as_f64();
    let mut warnings = Vec::new();
    let outcome = |kappa: u64, warnings: &mut Vec<String>| -> Result<PredicateOutcome, ConstantsError> {
        let mut tol = 1e-4;
        loop {
            let mk = kernel::max_t_with_tol(base, kappa as f64, tol)?;
            let lo = m1.value * b * mk.value;
            let hi = m1.value * b * (mk.value + mk.margin);
            if hi < 1.0 {
                return Ok(PredicateOutcome {
                    holds: true,
                    margin: 1.0 - hi,
                });
            }
            if lo >= 1.0 {
                return Ok(PredicateOutcome {
                    holds: false,
                    margin: lo - 1.0,
                });
            }
            if tol > THRESHOLD_MARGIN {
                tol = THRESHOLD_MARGIN;
                continue;
            }
            warnings.push(format!(
                "kappa_b(b={base}): certified interval [{lo}, {hi}] for κ={kappa} straddles 1 \
                 within {THRESHOLD_MARGIN}; treating the candidate as failing"
            ));
            return Ok(PredicateOutcome {
                holds: false,
                margin: 0.0,
            });
        }
    };
    let mut first_err: Option<ConstantsError> = None;
    let res = numerics::smallest_true(
        |k| match outcome(k, &mut warnings) {
            Ok(o) => o,
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
                PredicateOutcome {
                    holds: false,
                    margin: 0.0,
                }
            }
        },
        1,
        KAPPA_CAP,
    );
    if let Some(e) = first_err {
        return Err(e);
    }
    let res = res?;
    if res.witness_at < THRESHOLD_MARGIN {
        warnings.push(format!(
            "kappa_b(b={base}): deciding margin {} at κ={} is below {THRESHOLD_MARGIN}",
            res.witness_at, res.value
        ));
    }
    Ok(KappaResult {
        kappa: res.value,
        margin_at: res.witness_at,
        margin_below: res.witness_below,
        warnings,
    })
}

/// `(u_b, ι_b)` given `κ_b`.
pub fn u_iota(base: Base, kappa: u64) -> (f64, f64) {
    let b = base.as_f64();
    let eta = kernel::eta(base);
    let p_minus = smallest_prime_factor(base.as_u64()) as f64;
    let u = (1.0 - 2.0 * eta) / 2.0 * p_minus.ln() / b.ln();
    let iota = u / (1.0 + 2.0 * (kappa as f64 + 1.0) * u);
    (u, iota)
}

/// `ξ_0(b)`: the four-term minimum.
pub fn xi0(base: Base) -> Result<f64, ConstantsError> {
    let k = kappa_b(base)?;
    Ok(xi0_from_parts(kernel::eta(base), u_iota(base, k.kappa)))
}

fn xi0_from_parts(eta: f64, (u, iota): (f64, f64)) -> f64 {
    let t1 = (1.0 - (1.0 + 2.0 * eta) / 2.0) / (2.0 * (3.0 + 4.0 * eta));
    let t2 = u / (3.0 * (3.0 - 4.0 * u));
    let t3 = iota / (3.0 * (1.0 + 6.0 * iota));
    t1.min(t2).min(t3).min(1.0 / 33.0)
}

fn guarded_ceil(x: f64, quantity: &'static str) -> Result<u64, ConstantsError> {
    if (x - x.round()).abs() < CEILING_GUARD {
        return Err(ConstantsError::CeilingAmbiguous {
            quantity,
            value: x,
            guard: CEILING_GUARD,
        });
    }
    Ok(x.ceil() as u64)
}

fn guarded_floor(x: f64, quantity: &'static str) -> Result<u64, ConstantsError> {
    if (x - x.round()).abs() < CEILING_GUARD {
        return Err(ConstantsError::CeilingAmbiguous {
            quantity,
            value: x,
            guard: CEILING_GUARD,
        });
    }
    Ok(x.floor() as u64)
}

/// `Ω_b = 1 + ⌈1/ξ_0(b)⌉`.
pub fn omega_b(base: Base) -> Result<u64, ConstantsError> {
    Ok(1 + guarded_ceil(1.0 / xi0(base)?, "1/xi0")?)
}

/// `Ω̃_b = ⌊2/ξ_0(b)⌋`.
pub fn omega_tilde(base: Base) -> Result<u64, ConstantsError> {
    guarded_floor(2.0 / xi0(base)?, "2/xi0")
}

/// `Λ_R = R + log(3/4·(1+3^{−R}))/log 3`; lies in `(R−1, R]`.
pub fn lambda_r(r: u64) -> Result<f64, ConstantsError> {
    if r < 2 {
        return Err(ConstantsError::InvalidR(r));
    }
    let v = r as f64 + (0.75 * (1.0 + 3.0f64.powi(-(r as i32)))).ln() / 3.0f64.ln();
    Ok(v)
}

/// `T_{∞,1} = ∫_{−1/2}^{1/2} sin(πt)/(πt) dt` by quadrature, accurate to
/// 1e−10.
pub fn t_infty_1() -> Result<f64, ConstantsError> {
    let f = |t: f64| {
        let u = std::f64::consts::PI * t;
        if u.abs() < 1e-4 {
            // Removable singularity: series through u⁴ keeps full accuracy.
            1.0 - u * u / 6.0 + u.powi(4) / 120.0
        } else {
            u.sin() / u
        }
    };
    let q = numerics::integrate(f, -0.5, 0.5, &QuadratureConfig::default())?;
    Ok(q.value)
}

/// `36/(π(T_{∞,1}^{−1} − 1)²) = 538.106849…`, the coefficient of `b²` in
/// the large-`b` bound for `Ω_b`.
pub fn asymptotic_coefficient() -> Result<f64, ConstantsError> {
    let t = t_infty_1()?;
    Ok(36.0 / (std::f64::consts::PI * (1.0 / t - 1.0).powi(2)))
}

/// Fully populated record for one base.
pub fn constants_record(base: Base) -> Result<ConstantsRecord, ConstantsError> {
    let eta = kernel::eta(base);
    let k = kappa_b(base)?;
    let zeta_1 = kernel::zeta(base, 1.0)?;
    let zeta_kappa = kernel::zeta(base, k.kappa as f64)?;
    let (u_b, iota_b) = u_iota(base, k.kappa);
    let xi0 = xi0_from_parts(eta, (u_b, iota_b));
    let omega_b = 1 + guarded_ceil(1.0 / xi0, "1/xi0")?;
    let omega_tilde = guarded_floor(2.0 / xi0, "2/xi0")?;
    Ok(ConstantsRecord {
        base,
        eta,
        kappa_b: k.kappa,
        zeta_1,
        zeta_kappa,
        eps_b: zeta_1 + zeta_kappa - 1.0,
        u_b,
        iota_b,
        xi0,
        omega_b,
        omega_tilde,
        warnings: k.warnings,
    })
}

/// Records for every base in `[b_min, b_max]`, computed in parallel.
pub fn constants_table(b_min: u32, b_max: u32) -> Result<Vec<ConstantsRecord>, ConstantsError> {
    assert!(2 <= b_min && b_min <= b_max);
    (b_min..=b_max)
        .into_par_iter()
        .map(|b| constants_record(Base::new(b)?))
        .collect()
}

/// `ξ_0` rendered with the truncation convention of the published table:
/// eight decimal places, truncated rather than rounded.
pub fn xi0_truncated(x: f64) -> String {
    let s = format!("{x:.16}");
    match s.find('.') {
        Some(dot) if s.len() > dot + 8 => s[..dot + 9].to_string(),
        _ => s,
    }
}
