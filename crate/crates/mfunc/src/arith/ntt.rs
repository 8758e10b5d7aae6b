//! Number-theoretic transforms over a fixed set of word-size primes, plus
//! Garner reconstruction. Used to multiply the long integer power series
//! behind the τ table: coefficients are carried as residues modulo each prime
//! and recombined exactly at the end.

use num_bigint::BigInt;

/// NTT-friendly primes `c * 2^k + 1` (all support transforms up to 2^23),
/// with primitive roots 3, 3, 3, 3, 11 baked into the dispatch below. Their
/// product exceeds 2^148, comfortably above twice the Deligne bound
/// `d(n) n^{11/2}` for every n this crate accepts.
pub(crate) const MODULI: [u64; 5] = [998244353, 1224736769, 469762049, 167772161, 754974721];

/// Largest transform size supported by every prime in `MODULI`.
pub(crate) const MAX_TRANSFORM: usize = 1 << 23;

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// In-place iterative radix-2 transform. `a.len()` must be a power of two
/// dividing `P - 1`; all values must be reduced mod `P`.
fn ntt<const P: u64, const G: u64>(a: &mut [u64], invert: bool) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    debug_assert!((P - 1) % n as u64 == 0);

    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }

    let mut len = 2usize;
    while len <= n {
        let mut wlen = pow_mod(G, (P - 1) / len as u64, P);
        if invert {
            wlen = inv_mod(wlen, P);
        }
        for chunk in a.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(len / 2);
            let mut w = 1u64;
            for k in 0..len / 2 {
                let u = lo[k];
                let v = hi[k] * w % P;
                let s = u + v;
                lo[k] = if s >= P { s - P } else { s };
                hi[k] = if u >= v { u - v } else { u + P - v };
                w = w * wlen % P;
            }
        }
        len <<= 1;
    }

    if invert {
        let n_inv = inv_mod(n as u64, P);
        for x in a.iter_mut() {
            *x = *x * n_inv % P;
        }
    }
}

fn convolve<const P: u64, const G: u64>(a: &[u64], b: &[u64], out_len: usize) -> Vec<u64> {
    let full = a.len() + b.len() - 1;
    // short operands: schoolbook is both faster and avoids tiny transforms
    if a.len().min(b.len()) <= 32 {
        let mut out = vec![0u64; full.min(out_len)];
        for (i, &x) in a.iter().enumerate() {
            if i >= out_len || x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if i + j >= out_len {
                    break;
                }
                out[i + j] = (out[i + j] + x * y) % P;
            }
        }
        out.resize(out_len.min(full), 0);
        return out;
    }
    let size = full.next_power_of_two();
    assert!(size <= MAX_TRANSFORM, "transform size {size} unsupported");
    let mut fa = vec![0u64; size];
    fa[..a.len()].copy_from_slice(a);
    let mut out;
    if std::ptr::eq(a, b) {
        ntt::<P, G>(&mut fa, false);
        for x in fa.iter_mut() {
            *x = *x * *x % P;
        }
        ntt::<P, G>(&mut fa, true);
        out = fa;
    } else {
        let mut fb = vec![0u64; size];
        fb[..b.len()].copy_from_slice(b);
        ntt::<P, G>(&mut fa, false);
        ntt::<P, G>(&mut fb, false);
        for (x, y) in fa.iter_mut().zip(fb.iter()) {
            *x = *x * *y % P;
        }
        ntt::<P, G>(&mut fa, true);
        out = fa;
    }
    out.truncate(out_len.min(full));
    out
}

/// Product of two polynomials with coefficients mod `MODULI[idx]`, truncated
/// to `out_len` coefficients. Passing the same slice twice squares it.
pub(crate) fn convolve_mod(idx: usize, a: &[u64], b: &[u64], out_len: usize) -> Vec<u64> {
    match idx {
        0 => convolve::<998244353, 3>(a, b, out_len),
        1 => convolve::<1224736769, 3>(a, b, out_len),
        2 => convolve::<469762049, 3>(a, b, out_len),
        3 => convolve::<167772161, 3>(a, b, out_len),
        4 => convolve::<754974721, 11>(a, b, out_len),
        _ => unreachable!("modulus index out of range"),
    }
}

/// Precomputed Garner data for recombining residues into centered `BigInt`s.
pub(crate) struct Crt {
    /// inverse of `MODULI[0] * .. * MODULI[i-1]` modulo `MODULI[i]`
    inv_prefix: [u64; 5],
    modulus: BigInt,
    half: BigInt,
}

impl Crt {
    pub(crate) fn new() -> Self {
        let mut inv_prefix = [0u64; 5];
        for i in 1..5 {
            let p = MODULI[i];
            let mut prod = 1u64;
            for &m in &MODULI[..i] {
                prod = prod * (m % p) % p;
            }
            inv_prefix[i] = inv_mod(prod, p);
        }
        let modulus: BigInt = MODULI.iter().map(|&m| BigInt::from(m)).product();
        let half = &modulus / 2;
        Crt {
            inv_prefix,
            modulus,
            half,
        }
    }

    /// Mixed-radix digits of the unique x in `[0, ∏ m_i)` with the given residues.
    fn digits(&self, residues: [u64; 5]) -> [u64; 5] {
        let mut d = [0u64; 5];
        d[0] = residues[0];
        for i in 1..5 {
            let p = MODULI[i];
            // evaluate d0 + d1 m0 + d2 m0 m1 + ... (mod p) by Horner
            let mut v = 0u64;
            for j in (0..i).rev() {
                v = (v * (MODULI[j] % p) + d[j]) % p;
            }
            let r = residues[i];
            let diff = if r >= v { r - v } else { r + p - v };
            d[i] = diff * self.inv_prefix[i] % p;
        }
        d
    }

    /// Exact signed value with the given residues, centered in
    /// `(-M/2, M/2]` where M is the product of the moduli.
    pub(crate) fn reconstruct(&self, residues: [u64; 5]) -> BigInt {
        let d = self.digits(residues);
        let mut v = BigInt::from(d[4]);
        for i in (0..4).rev() {
            v = v * MODULI[i] + d[i];
        }
        if v > self.half {
            v -= &self.modulus;
        }
        v
    }
}
