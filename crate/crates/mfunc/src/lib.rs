//! Numerics for the value-distribution of log Euler products.
//!
//! An Euler product `φ(s) = ∏_n ∏_k (1 - a_n^{(k)} p_n^{-s})^{-1}` with unimodular
//! local roots (the Riemann zeta-function, modular-form L-functions, symmetric
//! power L-functions) has, on a vertical line `Re s = σ`, a limiting distribution
//! for `log φ(σ + it)`. Its density — the *M-function* `M_σ(z)` — is built here by
//! the classical Fourier route:
//!
//! 1. each prime contributes a closed curve `z_n(θ) = -Σ_k log(1 - a_n^{(k)} p_n^{-σ} e^{2πiθ})`
//!    ([`euler`]),
//! 2. the curve's characteristic function `K_n(w) = ∫_0^1 exp(i⟨z_n(θ), w⟩) dθ`
//!    is computed by periodic trapezoidal quadrature and multiplied over primes
//!    into `Λ_N(w)` ([`charfun`]),
//! 3. `Λ_N` is Fourier-inverted to the density `M_σ(z)` with the normalization
//!    `|dz| = dx dy / 2π` ([`density`]),
//! 4. the result is checked against directly sampled values of the truncated
//!    `log φ(σ + it)` over `t ∈ [-T, T]` ([`empirical`]).
//!
//! [`arith`] supplies primes, Ramanujan τ, and Hecke eigenvalue tables for the
//! discriminant form Δ (weight 12, level 1). [`satotate`] carries the interval
//! systems and closed-form Sato-Tate measures used to certify that enough primes
//! have a large first Taylor coefficient (the hypothesis behind the
//! Jessen-Wintner decay of the `K_n`).

pub mod arith;
pub mod charfun;
pub mod density;
pub mod empirical;
mod error;
pub mod euler;
pub mod geom;
pub mod io;
pub mod pipeline;
pub mod satotate;

pub use error::{Error, Result};

pub use arith::{hecke_table, sieve_primes, tau_coefficients, HeckeTable, PrimeTable};
pub use charfun::{decay_profile, local_charfn, product_charfn, CharFnGrid};
pub use density::{invert, region_mass, DensityGrid};
pub use empirical::{
    bohr_jessen_ratio, build_histogram, discrepancy, sample_log, EmpiricalHistogram,
};
pub use euler::{EulerProductSpec, LocalCurve};
pub use geom::{GridGeometry, Rectangle};
pub use satotate::{build_intervals, closed_form_s, closed_form_t, st_ratio, IntervalSystem};
