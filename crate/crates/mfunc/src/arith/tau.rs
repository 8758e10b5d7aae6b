//! Ramanujan τ by q-expansion: Δ = q ∏_{m≥1} (1 - q^m)^24, so τ(n) is the
//! coefficient of q^{n-1} in E^24 where E = ∏ (1 - q^m).
//!
//! E is written down directly from the pentagonal number theorem (a ±1 series
//! with O(√bound) terms), E² follows by sparse convolution in machine words,
//! and the remaining 24th power is reached by repeated squaring
//! (E² → E⁴ → E⁸ → E¹⁶, then E¹⁶·E⁸). The long convolutions run as NTTs over
//! the word-size prime set in [`super::ntt`] and are recombined by CRT, which
//! keeps every coefficient exact: τ(p) near 10^6 has ~33 digits, far past any
//! fixed-width integer convolution.

use num_bigint::BigInt;
use rayon::prelude::*;

use super::ntt::{convolve_mod, Crt, MODULI};
use crate::error::{Error, Result};

/// Largest accepted `bound` for [`tau_coefficients`]. Keeps the transform size
/// within what the prime set supports and the BigInt table within a desktop
/// memory budget.
pub const MAX_TAU_BOUND: usize = 4_000_000;

/// Dense coefficients of ∏_{m=1}^{∞} (1 - q^m) up to degree `len - 1`, from
/// the pentagonal number theorem: entries are -1, 0, or 1.
pub(crate) fn pentagonal_series(len: usize) -> Vec<i64> {
    let mut e = vec![0i64; len];
    if len > 0 {
        e[0] = 1;
    }
    let mut k = 1i64;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 as usize >= len {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        e[g1 as usize] += sign;
        if (g2 as usize) < len {
            e[g2 as usize] += sign;
        }
        k += 1;
    }
    e
}

/// E² by sparse-sparse convolution; coefficients stay tiny.
fn euler_squared(len: usize) -> Vec<i64> {
    let e = pentagonal_series(len);
    let sparse: Vec<(usize, i64)> = e
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect();
    let mut out = vec![0i64; len];
    for (a, &(i, ci)) in sparse.iter().enumerate() {
        for &(j, cj) in &sparse[a..] {
            let idx = i + j;
            if idx >= len {
                break;
            }
            // off-diagonal pairs occur twice
            out[idx] += if i == j { ci * cj } else { 2 * ci * cj };
        }
    }
    out
}

fn residues_mod(coeffs: &[i64], idx: usize) -> Vec<u64> {
    let p = MODULI[idx] as i64;
    coeffs.iter().map(|&c| (c.rem_euclid(p)) as u64).collect()
}

/// E^24 mod MODULI[idx], truncated to `bound` coefficients.
fn e24_residues(e2: &[i64], idx: usize, bound: usize) -> Vec<u64> {
    let e2m = residues_mod(e2, idx);
    let e4 = convolve_mod(idx, &e2m, &e2m, bound);
    let e8 = convolve_mod(idx, &e4, &e4, bound);
    let e16 = convolve_mod(idx, &e8, &e8, bound);
    convolve_mod(idx, &e16, &e8, bound)
}

/// Exact τ(n) for 1 ≤ n ≤ bound; entry `i` holds τ(i + 1).
///
/// Runs one residue pipeline per CRT prime (in parallel) and reconstructs the
/// integer coefficients at the end, so the result is exact for all n.
pub fn tau_coefficients(bound: usize) -> Result<Vec<BigInt>> {
    if bound < 1 {
        return Err(Error::EmptyDomain("tau bound must be at least 1".into()));
    }
    if bound > MAX_TAU_BOUND {
        return Err(Error::Resource(format!(
            "tau bound {bound} exceeds supported maximum {MAX_TAU_BOUND}"
        )));
    }
    let e2 = euler_squared(bound);
    let per_prime: Vec<Vec<u64>> = (0..MODULI.len())
        .into_par_iter()
        .map(|idx| e24_residues(&e2, idx, bound))
        .collect();
    let crt = Crt::new();
    let out: Vec<BigInt> = (0..bound)
        .into_par_iter()
        .map(|n| {
            let mut res = [0u64; 5];
            for (k, v) in per_prime.iter().enumerate() {
                res[k] = v.get(n).copied().unwrap_or(0);
            }
            crt.reconstruct(res)
        })
        .collect();
    Ok(out)
}
