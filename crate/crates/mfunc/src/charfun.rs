//! Local characteristic functions `K_n(w) = ∫_0^1 exp(i⟨z_n(θ), w⟩) dθ` by
//! periodic trapezoidal quadrature, their Jessen-Wintner decay diagnostics,
//! and the truncated product `Λ_N(w) = ∏_{n≤N} K_n(w)` sampled on a Cartesian
//! w-grid.
//!
//! The integrand is smooth and periodic, so the trapezoidal rule converges
//! geometrically once the oscillation (about `|w| p^{-σ} g` cycles) is
//! resolved; node counts start there and double until two successive values
//! agree.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::euler::{EulerProductSpec, LocalCurve};

/// Quadrature controls for [`local_charfn`] and the grid builder.
#[derive(Clone, Copy, Debug)]
pub struct CharFnParams {
    /// absolute agreement required between successive node doublings
    pub tol: f64,
    /// node budget; exceeding it yields an accuracy error
    pub max_nodes: usize,
}

impl Default for CharFnParams {
    fn default() -> Self {
        CharFnParams {
            tol: 1e-10,
            max_nodes: 1 << 22,
        }
    }
}

fn initial_nodes(curve: &LocalCurve, w_abs: f64) -> usize {
    let osc = 8.0 * w_abs * (curve.prime() as f64).powf(-curve.sigma()) * curve.degree() as f64;
    (osc.ceil().max(64.0) as usize).next_power_of_two()
}

/// Mean of `exp(i⟨z(θ), w⟩)` over `m` equispaced nodes offset by `shift/m`.
fn charfn_mean(curve: &LocalCurve, w: Complex64, m: usize, shift: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..m {
        let theta = (k as f64 + shift) / m as f64;
        let phase = curve.pairing(theta, w);
        acc += Complex64::from_polar(1.0, phase);
    }
    acc / m as f64
}

/// Curve samples (x_m, y_m) at m equispaced θ nodes; reused across many w.
fn curve_nodes(curve: &LocalCurve, m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(m);
    let mut ys = Vec::with_capacity(m);
    for k in 0..m {
        let z = curve.eval_taylor(k as f64 / m as f64);
        xs.push(z.re);
        ys.push(z.im);
    }
    (xs, ys)
}

fn mean_over_nodes(xs: &[f64], ys: &[f64], w: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        acc += Complex64::from_polar(1.0, x * w.re + y * w.im);
    }
    acc / xs.len() as f64
}

/// K_n(w) to the configured tolerance. |K_n| ≤ 1 always; the value at w = 0
/// is exactly 1.
pub fn local_charfn(curve: &LocalCurve, w: Complex64, params: &CharFnParams) -> Result<Complex64> {
    if curve.degree() == 0 {
        // an omitted local factor contributes the empty product
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut m = initial_nodes(curve, w.norm());
    let mut val = charfn_mean(curve, w, m, 0.0);
    loop {
        // doubling reuses the coarse mean: nodes of 2m = nodes of m plus midpoints
        let mid = charfn_mean(curve, w, m, 0.5);
        let refined = (val + mid) / 2.0;
        let err = (refined - val).norm();
        m *= 2;
        val = refined;
        if err < params.tol {
            return Ok(val);
        }
        if m > params.max_nodes {
            return Err(Error::Accuracy {
                context: format!("K_n quadrature at p = {}, |w| = {}", curve.prime(), w.norm()),
                achieved: err,
                requested: params.tol,
            });
        }
    }
}

/// Node count at which the quadrature for this curve has converged for every
/// |w| up to `w_abs` (calibrated on a few directions at the largest radius).
fn calibrate_nodes(curve: &LocalCurve, w_abs: f64, params: &CharFnParams) -> Result<usize> {
    let mut need = 64usize;
    for tau in [0.0, std::f64::consts::FRAC_PI_4, 1.9] {
        let w = Complex64::from_polar(w_abs, tau);
        let mut m = initial_nodes(curve, w_abs);
        let mut val = charfn_mean(curve, w, m, 0.0);
        loop {
            let mid = charfn_mean(curve, w, m, 0.5);
            let refined = (val + mid) / 2.0;
            let err = (refined - val).norm();
            m *= 2;
            val = refined;
            if err < params.tol {
                break;
            }
            if m > params.max_nodes {
                return Err(Error::Accuracy {
                    context: format!(
                        "grid calibration at p = {}, |w| = {w_abs}",
                        curve.prime()
                    ),
                    achieved: err,
                    requested: params.tol,
                });
            }
        }
        need = need.max(m);
    }
    Ok(need)
}

/// One radius of a decay table.
#[derive(Clone, Copy, Debug)]
pub struct DecayRow {
    pub radius: f64,
    /// sup over the probed directions of |K_n(radius · e^{iτ})|
    pub sup_abs: f64,
    /// sup_abs · min(√r · p^{-σ/2}, r · p^{-σ}): bounded across radii when the
    /// Jessen-Wintner estimate K_n = O(p^{σ/2}|w|^{-1/2} + p^σ|w|^{-1}) holds
    pub normalized: f64,
}

/// Decay diagnostics for one local curve.
#[derive(Clone, Debug)]
pub struct DecayProfile {
    pub prime: u64,
    pub sigma: f64,
    pub r1_abs: f64,
    pub rows: Vec<DecayRow>,
}

impl DecayProfile {
    /// max/min of the normalized sup across radii (1.0 = perfectly flat).
    pub fn normalized_ratio(&self) -> f64 {
        let min = self.rows.iter().map(|r| r.normalized).fold(f64::INFINITY, f64::min);
        let max = self.rows.iter().map(|r| r.normalized).fold(0.0f64, f64::max);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }
}

/// Table of sup_τ |K_n| over the given radii and directions.
pub fn decay_profile(
    curve: &LocalCurve,
    radii: &[f64],
    directions: &[f64],
    params: &CharFnParams,
) -> Result<DecayProfile> {
    if radii.is_empty() || radii.iter().any(|&r| r <= 0.0) {
        return Err(Error::Domain("decay radii must be positive".into()));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("decay radii must be strictly increasing".into()));
    }
    if directions.is_empty() {
        return Err(Error::Domain("need at least one direction".into()));
    }
    let rows = radii
        .par_iter()
        .map(|&r| decay_row(curve, r, directions, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayProfile {
        prime: curve.prime(),
        sigma: curve.sigma(),
        r1_abs: curve.r1().norm(),
        rows,
    })
}

fn decay_row(
    curve: &LocalCurve,
    r: f64,
    directions: &[f64],
    params: &CharFnParams,
) -> Result<DecayRow> {
    let p = curve.prime() as f64;
    let sigma = curve.sigma();
    let m = calibrate_nodes(curve, r, params)?;
    let (xs, ys) = curve_nodes(curve, m);
    let sup = directions
        .iter()
        .map(|&t| mean_over_nodes(&xs, &ys, Complex64::from_polar(r, t)).norm())
        .fold(0.0f64, f64::max);
    let scale = (r.sqrt() * p.powf(-sigma / 2.0)).min(r * p.powf(-sigma));
    Ok(DecayRow {
        radius: r,
        sup_abs: sup,
        normalized: sup * scale,
    })
}

/// Per-decade envelope of the normalized sup: each decade `(D/10, D]` is
/// probed at `probes` log-spaced radii and the largest normalized sup is
/// kept. The characteristic function oscillates through zeros in |w|, so a
/// single radius can dip arbitrarily low; the decade envelope tracks the
/// bound itself and is flat exactly when the Jessen-Wintner estimate holds.
#[derive(Clone, Debug)]
pub struct DecadeEnvelope {
    pub prime: u64,
    pub r1_abs: f64,
    pub decades: Vec<f64>,
    pub envelopes: Vec<f64>,
}

impl DecadeEnvelope {
    /// max/min of the per-decade envelopes.
    pub fn ratio(&self) -> f64 {
        let min = self.envelopes.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.envelopes.iter().copied().fold(0.0f64, f64::max);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }
}

/// Probe the decades ending at the given radii and aggregate the envelope.
pub fn decade_envelope(
    curve: &LocalCurve,
    decades: &[f64],
    probes: usize,
    directions: &[f64],
    params: &CharFnParams,
) -> Result<DecadeEnvelope> {
    if probes == 0 {
        return Err(Error::Domain("need at least one probe per decade".into()));
    }
    let mut envelopes = Vec::with_capacity(decades.len());
    for &d in decades {
        let radii: Vec<f64> = (1..=probes)
            .map(|i| d * 10f64.powf(i as f64 / probes as f64 - 1.0))
            .collect();
        let rows = radii
            .par_iter()
            .map(|&r| decay_row(curve, r, directions, params))
            .collect::<Result<Vec<_>>>()?;
        envelopes.push(rows.iter().map(|r| r.normalized).fold(0.0f64, f64::max));
    }
    Ok(DecadeEnvelope {
        prime: curve.prime(),
        r1_abs: curve.r1().norm(),
        decades: decades.to_vec(),
        envelopes,
    })
}

/// Count sign changes of g'_τ and g''_τ over one period on a uniform grid
/// (wrapping). For large p with |r₁| bounded away from zero both counts are 2:
/// the curve behaves like a perturbed circle. The grid is offset so the
/// structural zeros of the symmetric cases (τ = 0, real coefficients) do not
/// land exactly on sample points.
pub fn count_derivative_zeros(curve: &LocalCurve, tau: f64, grid: usize) -> (usize, usize) {
    let sample = |k: usize| (k as f64 + 0.37) / grid as f64;
    let mut s1 = 0usize;
    let mut s2 = 0usize;
    let mut prev1 = curve.g_tau_d1(sample(0), tau);
    let mut prev2 = curve.g_tau_d2(sample(0), tau);
    for k in 1..=grid {
        let theta = sample(k % grid);
        let v1 = curve.g_tau_d1(theta, tau);
        let v2 = curve.g_tau_d2(theta, tau);
        if v1 * prev1 < 0.0 {
            s1 += 1;
        }
        if v2 * prev2 < 0.0 {
            s2 += 1;
        }
        prev1 = v1;
        prev2 = v2;
    }
    (s1, s2)
}

/// Cartesian sampling grid for Λ_N: `nodes × nodes` points covering
/// `[-w_max, w_max]²` with an exact center node (odd `nodes`).
#[derive(Clone, Copy, Debug)]
pub struct WGrid {
    pub w_max: f64,
    pub nodes: usize,
}

impl WGrid {
    pub fn new(w_max: f64, nodes: usize) -> Result<Self> {
        if !(w_max.is_finite() && w_max > 0.0) {
            return Err(Error::Domain(format!("w_max must be positive, got {w_max}")));
        }
        if nodes < 3 || nodes % 2 == 0 {
            return Err(Error::Domain(format!(
                "w grid needs an odd node count >= 3, got {nodes}"
            )));
        }
        Ok(WGrid { w_max, nodes })
    }

    pub fn delta(&self) -> f64 {
        2.0 * self.w_max / (self.nodes - 1) as f64
    }
}

/// Sampled values of the truncated product Λ_N(w) over a symmetric Cartesian
/// grid, with the first-order bound on what the omitted primes could change.
#[derive(Clone, Debug)]
pub struct CharFnGrid {
    pub spec_name: String,
    pub sigma: f64,
    pub n_primes: usize,
    pub w_max: f64,
    pub nodes: usize,
    /// row-major, u fastest: `values[iv * nodes + iu]` at
    /// w = (-w_max + iu Δ) + i(-w_max + iv Δ)
    pub values: Vec<Complex64>,
    /// |w|_max · Σ_{n>N} 2 g p_n^{-σ}/(1-p_n^{-σ}); infinite for σ ≤ 1
    pub tail_bound: f64,
    /// set when σ ≤ σ₀ of the spec
    pub heuristic: bool,
    /// bad primes omitted from the product (partial symmetric powers)
    pub skipped_primes: Vec<u64>,
}

impl CharFnGrid {
    pub fn delta(&self) -> f64 {
        2.0 * self.w_max / (self.nodes - 1) as f64
    }

    pub fn node_w(&self, iu: usize, iv: usize) -> Complex64 {
        let d = self.delta();
        Complex64::new(-self.w_max + iu as f64 * d, -self.w_max + iv as f64 * d)
    }

    pub fn value(&self, iu: usize, iv: usize) -> Complex64 {
        self.values[iv * self.nodes + iu]
    }

    /// Largest |w| represented on the grid (the corner).
    pub fn max_abs_w(&self) -> f64 {
        self.w_max * std::f64::consts::SQRT_2
    }

    /// Build a grid from a closed-form characteristic function (used for
    /// synthetic self-tests such as the Gaussian transform pair).
    pub fn from_fn(
        name: &str,
        sigma: f64,
        grid: WGrid,
        f: impl Fn(Complex64) -> Complex64,
    ) -> CharFnGrid {
        let n = grid.nodes;
        let mut values = Vec::with_capacity(n * n);
        for iv in 0..n {
            for iu in 0..n {
                let w = Complex64::new(
                    -grid.w_max + iu as f64 * grid.delta(),
                    -grid.w_max + iv as f64 * grid.delta(),
                );
                values.push(f(w));
            }
        }
        CharFnGrid {
            spec_name: name.into(),
            sigma,
            n_primes: 0,
            w_max: grid.w_max,
            nodes: n,
            values,
            tail_bound: 0.0,
            heuristic: false,
            skipped_primes: Vec::new(),
        }
    }
}

/// Multiply one curve's K_n into the quadrant `q` (u ≥ 0, v ≥ 0, side `c+1`).
///
/// K_n at a grid point is the quadrature mean over the curve nodes
/// (x_m, y_m); the exponential separates as exp(iu x_m)·exp(iv y_m), so each
/// row fixes the u factor and sweeps v by phasor rotation.
fn accumulate_quadrant(q: &mut [Complex64], side: usize, delta: f64, xs: &[f64], ys: &[f64]) {
    let m_nodes = xs.len();
    let inv_m = 1.0 / m_nodes as f64;
    q.par_chunks_mut(side).enumerate().for_each(|(a, row)| {
        let u = a as f64 * delta;
        let mut acc = vec![Complex64::new(0.0, 0.0); side];
        for m in 0..m_nodes {
            let pu = Complex64::from_polar(1.0, u * xs[m]);
            let rot = Complex64::from_polar(1.0, delta * ys[m]);
            let mut b = pu;
            for slot in acc.iter_mut() {
                *slot += b;
                b *= rot;
            }
        }
        for (slot, k) in row.iter_mut().zip(acc) {
            *slot *= k * inv_m;
        }
    });
}

/// Same as [`accumulate_quadrant`] for the upper half plane (v ≥ 0), full u
/// range; used when the curve is not conjugate-symmetric.
fn accumulate_half(
    h: &mut [Complex64],
    width: usize,
    rows: usize,
    w_max: f64,
    delta: f64,
    xs: &[f64],
    ys: &[f64],
) {
    let m_nodes = xs.len();
    let inv_m = 1.0 / m_nodes as f64;
    h.par_chunks_mut(width)
        .enumerate()
        .take(rows)
        .for_each(|(b, row)| {
            let v = b as f64 * delta;
            let mut acc = vec![Complex64::new(0.0, 0.0); width];
            for m in 0..m_nodes {
                let pv = Complex64::from_polar(1.0, v * ys[m]);
                let base = Complex64::from_polar(1.0, -w_max * xs[m]);
                let rot = Complex64::from_polar(1.0, delta * xs[m]);
                let mut u_phase = pv * base;
                for slot in acc.iter_mut() {
                    *slot += u_phase;
                    u_phase *= rot;
                }
            }
            for (slot, k) in row.iter_mut().zip(acc) {
                *slot *= k * inv_m;
            }
        });
}

/// Λ_N on a Cartesian w-grid: the pointwise product over the first `n_primes`
/// local characteristic functions.
///
/// `tail_tolerance`, when given, turns an oversized tail bound into a
/// cutoff-too-small error carrying the smallest adequate cutoff. The bound is
/// the crude first-order one and is infinite for σ ≤ 1, so the default is to
/// report it without gating.
pub fn product_charfn(
    spec: &EulerProductSpec,
    sigma: f64,
    n_primes: usize,
    grid: WGrid,
    params: &CharFnParams,
    tail_tolerance: Option<f64>,
) -> Result<CharFnGrid> {
    if sigma <= 0.0 {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    if n_primes == 0 {
        return Err(Error::EmptyDomain("need at least one prime in the product".into()));
    }
    if n_primes > spec.max_prime_index() {
        return Err(Error::IncompleteData(format!(
            "requested {n_primes} primes but spec '{}' supports {}",
            spec.name(),
            spec.max_prime_index()
        )));
    }
    let w_abs_max = grid.w_max * std::f64::consts::SQRT_2;
    let tail_bound = w_abs_max * spec.tail_sum_first_order(sigma, n_primes);
    if let Some(tol) = tail_tolerance {
        if !(tail_bound <= tol) {
            let suggestion = suggest_cutoff(spec, sigma, w_abs_max, tol, n_primes);
            return Err(Error::CutoffTooSmall {
                tail_bound,
                tolerance: tol,
                suggestion,
            });
        }
    }

    let nu = grid.nodes;
    let c = (nu - 1) / 2;
    let delta = grid.delta();
    let use_quadrant = spec.is_conj_symmetric();

    // working array: quadrant (c+1)² or upper half (c+1) rows × nu columns
    let side = c + 1;
    let mut work = if use_quadrant {
        vec![Complex64::new(1.0, 0.0); side * side]
    } else {
        vec![Complex64::new(1.0, 0.0); side * nu]
    };

    for n in 1..=n_primes {
        let curve = spec.local_curve(n, sigma)?;
        if curve.degree() == 0 {
            continue; // omitted bad prime
        }
        let m_nodes = calibrate_nodes(&curve, w_abs_max, params)?;
        let mut xs = Vec::with_capacity(m_nodes);
        let mut ys = Vec::with_capacity(m_nodes);
        for m in 0..m_nodes {
            let z = curve.eval_taylor(m as f64 / m_nodes as f64);
            xs.push(z.re);
            ys.push(z.im);
        }
        if use_quadrant {
            accumulate_quadrant(&mut work, side, delta, &xs, &ys);
        } else {
            accumulate_half(&mut work, nu, side, grid.w_max, delta, &xs, &ys);
        }
    }

    // unfold onto the full symmetric grid
    let mut values = vec![Complex64::new(0.0, 0.0); nu * nu];
    if use_quadrant {
        for iv in 0..nu {
            let dv = iv as isize - c as isize;
            for iu in 0..nu {
                let du = iu as isize - c as isize;
                let q = work[(du.unsigned_abs()) * side + (dv.unsigned_abs())];
                values[iv * nu + iu] = if du < 0 { q.conj() } else { q };
            }
        }
    } else {
        for iv in c..nu {
            let src = (iv - c) * nu;
            values[iv * nu..iv * nu + nu].copy_from_slice(&work[src..src + nu]);
        }
        for iv in 0..c {
            for iu in 0..nu {
                values[iv * nu + iu] = values[(2 * c - iv) * nu + (2 * c - iu)].conj();
            }
        }
    }

    Ok(CharFnGrid {
        spec_name: spec.name().to_string(),
        sigma,
        n_primes,
        w_max: grid.w_max,
        nodes: nu,
        values,
        tail_bound,
        heuristic: sigma <= spec.sigma0(),
        skipped_primes: spec.skipped_primes(n_primes),
    })
}

fn suggest_cutoff(
    spec: &EulerProductSpec,
    sigma: f64,
    w_abs_max: f64,
    tol: f64,
    from: usize,
) -> String {
    let max_n = spec.max_prime_index();
    for n in from..=max_n {
        if w_abs_max * spec.tail_sum_first_order(sigma, n) <= tol {
            return format!("use at least {n} primes");
        }
    }
    format!(
        "no cutoff within the sieved table of {max_n} primes reaches tolerance {tol:.2e} at sigma = {sigma}"
    )
}

/// Scan parameters for the pre-inversion decay check.
#[derive(Clone, Copy, Debug)]
pub struct PreflightParams {
    /// lower bound on |r₁| for a prime to count (the large-first-coefficient
    /// hypothesis)
    pub r1_threshold: f64,
    /// how many qualifying, decaying primes are required
    pub required: usize,
    /// how many prime indices to scan before giving up
    pub max_scan: usize,
    /// accepted spread (max/min) of the per-decade envelopes
    pub ratio_tol: f64,
    pub n_directions: usize,
    pub probes_per_decade: usize,
}

impl Default for PreflightParams {
    fn default() -> Self {
        PreflightParams {
            r1_threshold: 0.3,
            required: 5,
            max_scan: 200,
            ratio_tol: 1.2,
            n_directions: 32,
            probes_per_decade: 16,
        }
    }
}

/// Result of the decay preflight: the envelopes inspected and who passed.
#[derive(Clone, Debug)]
pub struct DecayPreflight {
    pub envelopes: Vec<DecadeEnvelope>,
    pub passing: Vec<u64>,
}

/// Verify that at least `required` primes with |r₁| above the threshold show
/// the bounded Jessen-Wintner decay needed for the inversion integral to make
/// sense: the normalized-sup envelope must be flat (within `ratio_tol`)
/// across the decades ending at 10², 10³, 10⁴. Fails with a quality error
/// otherwise.
pub fn decay_preflight(
    spec: &EulerProductSpec,
    sigma: f64,
    params: &PreflightParams,
) -> Result<DecayPreflight> {
    let decades = [1e2, 1e3, 1e4];
    let dirs: Vec<f64> = (0..params.n_directions)
        .map(|k| TAU * k as f64 / params.n_directions as f64)
        .collect();
    let quad = CharFnParams::default();
    let mut envelopes = Vec::new();
    let mut passing = Vec::new();
    let scan_to = params.max_scan.min(spec.max_prime_index());
    for n in 1..=scan_to {
        if passing.len() >= params.required {
            break;
        }
        let curve = spec.local_curve(n, sigma)?;
        if curve.degree() == 0 || curve.r1().norm() < params.r1_threshold {
            continue;
        }
        let env = decade_envelope(&curve, &decades, params.probes_per_decade, &dirs, &quad)?;
        if env.ratio() <= params.ratio_tol {
            passing.push(env.prime);
        }
        envelopes.push(env);
    }
    if passing.len() < params.required {
        return Err(Error::Quality(format!(
            "decay preflight: only {} of the required {} primes with |r1| >= {} show a flat \
             normalized-sup envelope at sigma = {sigma} for spec '{}'",
            passing.len(),
            params.required,
            params.r1_threshold,
            spec.name()
        )));
    }
    Ok(DecayPreflight { envelopes, passing })
}
