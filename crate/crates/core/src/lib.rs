//! Computational toolkit for the arithmetic of base-`b` digit reversals.
//!
//! The crate provides the pieces needed to experiment with primes whose
//! reverse is almost prime:
//!
//! * [`digits`] — digit expansions, the reversal map `R_λ`, torus arithmetic;
//! * [`kernel`] — the normalized Dirichlet kernel `K_b` and the scalar
//!   functions derived from it (`ψ_b`, `η_b`, `T_{b,κ}`, `ζ_{b,κ}`, `Υ_b`),
//!   with certified maxima;
//! * [`fourier`] — the two-variable exponential sum `F_λ(α,ϑ)` of the
//!   reversal map, its product/splitting formulas, norm bounds and moments;
//! * [`numerics`] — composite Gauss–Legendre quadrature, certified
//!   maximization of periodic functions and integer threshold search;
//! * [`constants`] — the constant pipeline `κ_b → ι_b → ξ_0(b) → Ω_b` and the
//!   per-base tables it produces;
//! * [`sieve`] — segmented prime sieving, factor sieves and the counting
//!   statistics (`π_λ`, mirrored prime counts, equidistribution deviations,
//!   reversible/almost-prime censuses);
//! * [`expsums`] — Λ-weighted exponential sums over reversed digits, the
//!   Vaughan decomposition, type I/II sum evaluators, carry sets and an
//!   inequality testbed.

pub mod constants;
pub mod digits;
pub mod expsums;
pub mod fourier;
pub mod kernel;
pub mod numerics;
pub mod sieve;

pub use constants::ConstantsRecord;
pub use digits::{Base, DigitExpansion};
pub use fourier::{FourierPoint, RationalAngle};
pub use kernel::KernelProfile;
pub use numerics::{CertifiedMax, QuadratureConfig, ThresholdResult};
pub use sieve::{BlockCensus, CongruenceDeviation, FactorSieve, PrimeBlock};

/// Complex number alias used throughout the crate.
pub type Complex = num_complex::Complex64;
