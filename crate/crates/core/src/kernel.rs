//! The normalized Dirichlet kernel `K_b(x) = sin(πbx)/(b sin(πx))` and the
//! scalar functions built on it.
//!
//! * `ψ_b(x) = Σ_{r=1}^{b} |K_b(x + r/b)|` controls the per-digit `L¹`
//!   contraction of the reversal transform, through the exponent `η_b`.
//! * `T_{b,κ}(α) = (1/b) Σ_{ℓ<b} K_b^κ(‖(α+ℓ)/b‖/(b+1))` drives all `L^κ`
//!   moment bounds; its maximum is known in closed form for `κ ≤ 1` and is
//!   located by a certified search for `κ > 1`.
//! * `Υ_b` and `Υ'_b` quantify the decay of the product `G_λ` at rational
//!   points with small denominators.

use std::f64::consts::PI;

use crate::digits::{frac, torus_norm, Base};
use crate::numerics::{self, CertifiedMax, NumericsError};

/// Snap width around integers where `K_b` switches to its exact limit value.
const KERNEL_SNAP: f64 = 1e-9;

/// Default certification tolerance for kernel maxima.
pub const MAX_T_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("kappa must be positive, got {0}")]
    NonPositiveKappa(f64),
    #[error("certified maximization failed: {0}")]
    Certification(#[from] NumericsError),
}

/// Per-base record of the kernel-derived constants.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProfile {
    pub base: Base,
    pub eta: f64,
    pub psi_at_half_over_b: f64,
    pub k_at_inv_sq: f64,
    pub upsilon: f64,
    pub upsilon_prime: f64,
}

/// `K_b(x)`, with the removable singularity at integers filled by
/// `K_b(n) = (−1)^{n(b−1)}`.
///
/// The argument is reduced modulo 1 before any trigonometry, so the value
/// stays accurate for arguments of any size.  Within [`KERNEL_SNAP`] of an
/// integer the exact integer value is returned; the ratio is
/// well-conditioned everywhere else.
pub fn dirichlet_kernel(base: Base, x: f64) -> f64 {
    let b = base.as_f64();
    let r = x.round();
    let u = x - r;
    let odd_period = (base.get() - 1) % 2 == 1 && (r as i64) % 2 != 0;
    let sign = if odd_period { -1.0 } else { 1.0 };
    if u.abs() < KERNEL_SNAP {
        return sign;
    }
    let v = sign * (PI * b * u).sin() / (b * (PI * u).sin());
    v.clamp(-1.0, 1.0)
}

/// A Lipschitz constant for `K_b` on all of ℝ: `|K_b'| ≤ πb/2`.
pub fn kernel_derivative_bound(base: Base) -> f64 {
    PI * base.as_f64() / 2.0
}

/// `ψ_b(x) = Σ_{r=1}^{b} |K_b(x + r/b)|`.
pub fn psi(base: Base, x: f64) -> f64 {
    let b = base.as_f64();
    (1..=base.get())
        .map(|r| dirichlet_kernel(base, x + f64::from(r) / b).abs())
        .sum()
}

/// `η_b`: the closed form `log(2+√2)/(4 log 2)` for `b = 2`, and
/// `log ψ_b(1/(2b)) / log b` for `b ≥ 3`.
pub fn eta(base: Base) -> f64 {
    if base.get() == 2 {
        (2.0 + 2.0f64.sqrt()).ln() / (4.0 * 2.0f64.ln())
    } else {
        let b = base.as_f64();
        psi(base, 1.0 / (2.0 * b)).ln() / b.ln()
    }
}

#[inline]
fn t_mean_unchecked(base: Base, kappa: f64, alpha: f64) -> f64 {
    let b = base.as_f64();
    let scale = 1.0 / (b + 1.0);
    let mut acc = 0.0;
    let int_kappa = kappa.fract() == 0.0 && kappa >= 1.0 && kappa <= i32::MAX as f64;
    for l in 0..base.get() {
        let t = torus_norm((alpha + f64::from(l)) / b) * scale;
        let k = dirichlet_kernel(base, t);
        acc += if int_kappa {
            k.powi(kappa as i32)
        } else {
            k.powf(kappa)
        };
    }
    acc / b
}

/// `T_{b,κ}(α) = (1/b) Σ_{ℓ=0}^{b−1} K_b^κ(‖(α+ℓ)/b‖/(b+1))`.
///
/// 1-periodic, even, with values in `(0, 1]`.
pub fn t_mean(base: Base, kappa: f64, alpha: f64) -> Result<f64, KernelError> {
    if !(kappa > 0.0) {
        return Err(KernelError::NonPositiveKappa(kappa));
    }
    Ok(t_mean_unchecked(base, kappa, alpha))
}

/// `max_α T_{b,κ}(α)` with the default certification tolerance.
pub fn max_t(base: Base, kappa: f64) -> Result<CertifiedMax, KernelError> {
    max_t_with_tol(base, kappa, MAX_T_TOL)
}

/// A Lipschitz constant for `α ↦ T_{b,κ}(α)`, κ > 1.
///
/// Each of the `b` branches is `K_b^κ` composed with a map of slope
/// `1/(b(b+1))`, and `(K_b^κ)' = κ K_b^{κ−1} K_b'`.  Two bounds are
/// combined:
///
/// * globally `|K_b'| ≤ πb/2`;
/// * on the branch domain `[0, 1/(2b+2)] ⊂ [0, 1/b]`, `K_b(x) ≤
///   exp(−π²(b²−1)x²/6)` and `|K_b'(x)| ≤ π²(b²−1)x/3` (since `K_b'(0)=0`
///   and `|K_b''| ≤ π²(b²−1)/3` from the cosine expansion), so
///   `|(K_b^κ)'| ≤ κ π²(b²−1)x/3 · exp(−(κ−1)π²(b²−1)x²/6)`, maximized at
///   `x = (2a)^{−1/2}` with `a = (κ−1)π²(b²−1)/6`.
///
/// The second form shrinks like `√κ` and keeps the certified search fast
/// at the large κ the threshold scans reach.
pub fn t_lipschitz(base: Base, kappa: f64) -> f64 {
    let b = base.as_f64();
    let linear = kappa * PI * b / 2.0;
    let gaussian = if kappa >= 2.0 {
        let a = (kappa - 1.0) * PI * PI * (b * b - 1.0) / 6.0;
        kappa * PI * PI * (b * b - 1.0) / 3.0 / (2.0 * a * std::f64::consts::E).sqrt()
    } else {
        f64::INFINITY
    };
    linear.min(gaussian) / (b * (b + 1.0))
}

/// `max_α T_{b,κ}(α)`.
///
/// For `κ ≤ 1` the maximum is attained at `α = (b+1)/2` and is evaluated
/// exactly there.  For `κ > 1` no maximizer is known, so a certified global
/// search runs over one period with the Lipschitz bound [`t_lipschitz`].
pub fn max_t_with_tol(base: Base, kappa: f64, tol: f64) -> Result<CertifiedMax, KernelError> {
    if !(kappa > 0.0) {
        return Err(KernelError::NonPositiveKappa(kappa));
    }
    if kappa <= 1.0 {
        let arg = frac((base.as_f64() + 1.0) / 2.0).abs();
        return Ok(CertifiedMax {
            value: t_mean_unchecked(base, kappa, arg),
            argmax: arg,
            margin: 0.0,
        });
    }
    let m = numerics::max_periodic(
        |a| t_mean_unchecked(base, kappa, a),
        t_lipschitz(base, kappa),
        tol,
    )?;
    Ok(m)
}

/// `ζ_{b,κ} = −log(max_α T_{b,κ}(α)) / log b`.
pub fn zeta(base: Base, kappa: f64) -> Result<f64, KernelError> {
    let m = max_t(base, kappa)?;
    Ok(-m.value.ln() / base.as_f64().ln())
}

/// `Υ_b = −(log 2)·log K_b((b+1)^{−2}) / (4 log b) > 0`.
pub fn upsilon(base: Base) -> f64 {
    let b = base.as_f64();
    let k = dirichlet_kernel(base, (b + 1.0).powi(-2));
    -(2.0f64.ln()) * k.ln() / (4.0 * b.ln())
}

/// `Υ'_b = exp(4Υ_b / (1 − 2η_b)) > 1`.
pub fn upsilon_prime(base: Base) -> f64 {
    (4.0 * upsilon(base) / (1.0 - 2.0 * eta(base))).exp()
}

/// Assemble the per-base kernel profile.
pub fn kernel_profile(base: Base) -> KernelProfile {
    let b = base.as_f64();
    KernelProfile {
        base,
        eta: eta(base),
        psi_at_half_over_b: psi(base, 1.0 / (2.0 * b)),
        k_at_inv_sq: dirichlet_kernel(base, (b + 1.0).powi(-2)),
        upsilon: upsilon(base),
        upsilon_prime: upsilon_prime(base),
    }
}
