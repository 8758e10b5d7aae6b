//! Euler products with unimodular local roots, their per-prime curves
//! `z_n(θ) = -Σ_k log(1 - a_n^{(k)} p_n^{-σ} e^{2πiθ})`, and the Taylor data
//! `r_{j,n} = (1/j) Σ_k (a_n^{(k)})^j` those curves expand into.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{HeckeTable, PrimeTable};
use crate::error::{Error, Result};

/// Tail threshold for truncating local Taylor series: the geometric remainder
/// `g · x^{J+1} / ((J+1)(1-x))` is driven below this.
const TAYLOR_TAIL: f64 = 1e-14;

#[derive(Clone, Debug)]
enum SpecKind {
    /// Single root 1 at every prime: the Riemann zeta-function.
    Zeta,
    /// Roots {α_f(p), conj α_f(p)} at good primes, {λ_f(p)} at p | N.
    Modular { table: Arc<HeckeTable> },
    /// Roots {α^{γ-h} β^h : 0 ≤ h ≤ γ} at good primes; bad primes skipped
    /// (the partial symmetric power product).
    SymPow { table: Arc<HeckeTable>, gamma: u32 },
    /// Fixed root multiset reused at every prime (test/diagnostic specs).
    Synthetic { roots: Vec<Complex64> },
}

/// One member of the class of Euler products handled by this crate: per-prime
/// local roots of modulus ≤ 1, all exponents f(k,n) = 1, with a validity
/// abscissa σ₀ below which results are heuristic.
#[derive(Clone, Debug)]
pub struct EulerProductSpec {
    name: String,
    kind: SpecKind,
    primes: Arc<PrimeTable>,
    sigma0: f64,
    /// uniform bound on the number of local roots (C₀ with α = β = 0)
    c0: usize,
    conj_symmetric: bool,
}

/// Default prime capacity for freshly constructed specs.
pub const DEFAULT_SPEC_PRIME_LIMIT: u64 = 1_000_000;

fn default_primes() -> Arc<PrimeTable> {
    Arc::new(crate::arith::sieve_primes(DEFAULT_SPEC_PRIME_LIMIT).expect("default sieve"))
}

impl EulerProductSpec {
    pub fn zeta() -> Self {
        Self::zeta_with_primes(default_primes())
    }

    pub fn zeta_with_primes(primes: Arc<PrimeTable>) -> Self {
        EulerProductSpec {
            name: "zeta".into(),
            kind: SpecKind::Zeta,
            primes,
            sigma0: 0.5,
            c0: 1,
            conj_symmetric: true,
        }
    }

    pub fn modular(table: Arc<HeckeTable>) -> Result<Self> {
        Self::modular_with_primes(table, default_primes())
    }

    pub fn modular_with_primes(table: Arc<HeckeTable>, primes: Arc<PrimeTable>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::IncompleteData("empty Hecke table".into()));
        }
        let name = format!("modular-{}", table.form_id);
        Ok(EulerProductSpec {
            name,
            kind: SpecKind::Modular { table },
            primes,
            sigma0: 0.5,
            c0: 2,
            conj_symmetric: true,
        })
    }

    pub fn sympow(table: Arc<HeckeTable>, gamma: u32) -> Result<Self> {
        Self::sympow_with_primes(table, gamma, default_primes())
    }

    pub fn sympow_with_primes(
        table: Arc<HeckeTable>,
        gamma: u32,
        primes: Arc<PrimeTable>,
    ) -> Result<Self> {
        if gamma < 2 {
            return Err(Error::Domain(format!(
                "symmetric power needs gamma >= 2 (gamma = 1 is the modular L-function), got {gamma}"
            )));
        }
        if table.is_empty() {
            return Err(Error::IncompleteData("empty Hecke table".into()));
        }
        let name = format!("sympow{}-{}", gamma, table.form_id);
        Ok(EulerProductSpec {
            name,
            kind: SpecKind::SymPow { table, gamma },
            primes,
            sigma0: 1.0 - 1.0 / (gamma as f64 + 1.0),
            c0: gamma as usize + 1,
            conj_symmetric: true,
        })
    }

    /// Spec with the same root multiset at every prime; roots must have
    /// modulus ≤ 1.
    pub fn synthetic(name: &str, roots: Vec<Complex64>, sigma0: f64) -> Result<Self> {
        Self::synthetic_with_primes(name, roots, sigma0, default_primes())
    }

    pub fn synthetic_with_primes(
        name: &str,
        roots: Vec<Complex64>,
        sigma0: f64,
        primes: Arc<PrimeTable>,
    ) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::EmptyDomain("synthetic spec needs at least one root".into()));
        }
        for r in &roots {
            if r.norm() > 1.0 + 1e-12 {
                return Err(Error::Domain(format!(
                    "synthetic root {r} has modulus > 1"
                )));
            }
        }
        let conj_symmetric = {
            let mut ok = true;
            for r in &roots {
                let c = r.conj();
                ok &= roots.iter().any(|s| (s - c).norm() < 1e-12);
            }
            ok
        };
        let c0 = roots.len();
        Ok(EulerProductSpec {
            name: name.into(),
            kind: SpecKind::Synthetic { roots },
            primes,
            sigma0,
            c0,
            conj_symmetric,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    /// Number of local roots g(n); uniform across primes for these specs.
    pub fn degree(&self) -> usize {
        self.c0
    }

    pub fn primes(&self) -> &Arc<PrimeTable> {
        &self.primes
    }

    /// True when every local root multiset is closed under conjugation, which
    /// makes the curves satisfy z(-θ) = conj z(θ).
    pub fn is_conj_symmetric(&self) -> bool {
        self.conj_symmetric
    }

    /// Largest usable 1-based prime index (bounded by the sieve and, for
    /// table-backed specs, by the table's prime limit).
    pub fn max_prime_index(&self) -> usize {
        match &self.kind {
            SpecKind::Zeta | SpecKind::Synthetic { .. } => self.primes.len(),
            SpecKind::Modular { table } | SpecKind::SymPow { table, .. } => {
                self.primes.count_leq(table.prime_limit)
            }
        }
    }

    /// `p_n` for 1-based n.
    pub fn prime(&self, n: usize) -> Result<u64> {
        let p = self.primes.nth(n)?;
        match &self.kind {
            SpecKind::Modular { table } | SpecKind::SymPow { table, .. } => {
                if p > table.prime_limit {
                    return Err(Error::IncompleteData(format!(
                        "prime {p} beyond Hecke table limit {}",
                        table.prime_limit
                    )));
                }
            }
            _ => {}
        }
        Ok(p)
    }

    /// Primes p | N skipped by the partial symmetric power product, among the
    /// first `n_primes` indices.
    pub fn skipped_primes(&self, n_primes: usize) -> Vec<u64> {
        match &self.kind {
            SpecKind::SymPow { table, .. } => self
                .primes
                .primes
                .iter()
                .take(n_primes)
                .copied()
                .filter(|&p| table.is_bad_prime(p))
                .collect(),
            _ => Vec::new(),
        }
    }

    fn is_skipped(&self, p: u64) -> bool {
        match &self.kind {
            SpecKind::SymPow { table, .. } => table.is_bad_prime(p),
            _ => false,
        }
    }

    /// Local roots a_n^{(k)} at prime index n. Symmetric-power roots at a bad
    /// prime come back empty (that local factor is omitted from the partial
    /// product).
    pub fn roots_at(&self, n: usize) -> Result<Vec<Complex64>> {
        let p = self.prime(n)?;
        match &self.kind {
            SpecKind::Zeta => Ok(vec![Complex64::new(1.0, 0.0)]),
            SpecKind::Synthetic { roots } => Ok(roots.clone()),
            SpecKind::Modular { table } => {
                let e = table.get(p).ok_or_else(|| {
                    Error::IncompleteData(format!("prime {p} missing from Hecke table"))
                })?;
                if table.is_bad_prime(p) {
                    Ok(vec![Complex64::new(e.lambda, 0.0)])
                } else {
                    let a = Complex64::from_polar(1.0, e.theta);
                    Ok(vec![a, a.conj()])
                }
            }
            SpecKind::SymPow { table, gamma } => {
                if table.is_bad_prime(p) {
                    return Ok(Vec::new());
                }
                let e = table.get(p).ok_or_else(|| {
                    Error::IncompleteData(format!("prime {p} missing from Hecke table"))
                })?;
                let g = *gamma as i64;
                Ok((0..=g)
                    .map(|h| Complex64::from_polar(1.0, (g - 2 * h) as f64 * e.theta))
                    .collect())
            }
        }
    }

    /// Taylor coefficient r_{j,n} = (1/j) Σ_k (a_n^{(k)})^j by the power-sum
    /// formula. For table-backed specs the sum collapses to cosines of jθ,
    /// which keeps the value exactly real.
    pub fn taylor_r(&self, j: u32, n: usize) -> Result<Complex64> {
        if j == 0 {
            return Err(Error::Domain("Taylor index j starts at 1".into()));
        }
        let p = self.prime(n)?;
        let jf = j as f64;
        match &self.kind {
            SpecKind::Zeta => Ok(Complex64::new(1.0 / jf, 0.0)),
            SpecKind::Synthetic { roots } => {
                let s: Complex64 = roots.iter().map(|a| a.powu(j)).sum();
                Ok(s / jf)
            }
            SpecKind::Modular { table } => {
                let e = table.get(p).ok_or_else(|| {
                    Error::IncompleteData(format!("prime {p} missing from Hecke table"))
                })?;
                if table.is_bad_prime(p) {
                    Ok(Complex64::new(e.lambda.powi(j as i32) / jf, 0.0))
                } else {
                    Ok(Complex64::new(2.0 * (jf * e.theta).cos() / jf, 0.0))
                }
            }
            SpecKind::SymPow { table, gamma } => {
                if table.is_bad_prime(p) {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let e = table.get(p).ok_or_else(|| {
                    Error::IncompleteData(format!("prime {p} missing from Hecke table"))
                })?;
                Ok(Complex64::new(
                    power_sum_cos(*gamma, j, e.theta) / jf,
                    0.0,
                ))
            }
        }
    }

    /// Local curve at prime index n and abscissa σ.
    pub fn local_curve(&self, n: usize, sigma: f64) -> Result<LocalCurve> {
        let p = self.prime(n)?;
        let roots = self.roots_at(n)?;
        LocalCurve::new(p, sigma, roots)
    }

    /// Per-component variance of the N-prime truncation:
    /// Σ_{n≤N} Σ_j |r_{j,n}|² p^{-2jσ} / 2 (each Fourier mode contributes half
    /// its squared modulus to either coordinate).
    pub fn component_variance(&self, sigma: f64, n_primes: usize) -> Result<f64> {
        let n_max = n_primes.min(self.max_prime_index());
        let mut var = 0.0;
        for n in 1..=n_max {
            let p = self.prime(n)? as f64;
            if self.is_skipped(p as u64) {
                continue;
            }
            let x = p.powf(-sigma);
            let jmax = taylor_truncation(self.degree(), x);
            for j in 1..=jmax {
                let r = self.taylor_r(j as u32, n)?;
                var += r.norm_sqr() * x.powi(2 * j as i32) / 2.0;
            }
        }
        Ok(var)
    }

    /// First-order tail bound for omitting primes with index > `n_primes`:
    /// max|w| is multiplied by Σ_{n>N} 2 g(n) p_n^{-σ} / (1 - p_n^{-σ}).
    /// Exact over the sieved primes, with an integer-sum remainder beyond the
    /// sieve; infinite for σ ≤ 1 (the sum over primes diverges there).
    pub fn tail_sum_first_order(&self, sigma: f64, n_primes: usize) -> f64 {
        let g = self.degree() as f64;
        let primes = &self.primes.primes;
        if n_primes >= primes.len() {
            // nothing sieved beyond the cutoff; fall through to the remainder
        }
        let mut sum = 0.0;
        for &p in primes.iter().skip(n_primes) {
            if self.is_skipped(p) {
                continue;
            }
            let x = (p as f64).powf(-sigma);
            sum += 2.0 * g * x / (1.0 - x);
        }
        if sigma <= 1.0 {
            return f64::INFINITY;
        }
        // primes above the sieve limit, bounded by the sum over all integers
        let x0 = self.primes.limit as f64;
        let xm = x0.powf(-sigma);
        sum += 2.0 * g / (1.0 - xm) * x0.powf(1.0 - sigma) / (sigma - 1.0);
        sum
    }
}

/// Number of Taylor terms needed so the geometric tail drops below
/// [`TAYLOR_TAIL`], for |x| = p^{-σ} · max|a|.
pub(crate) fn taylor_truncation(degree: usize, x: f64) -> usize {
    let g = degree as f64;
    let mut j = 1usize;
    let mut xj = x; // x^j
    loop {
        let tail = g * xj * x / ((j as f64 + 1.0) * (1.0 - x));
        if tail < TAYLOR_TAIL || j >= 512 {
            return j;
        }
        xj *= x;
        j += 1;
    }
}

/// Σ_{h=0}^{γ} cos(j (γ - 2h) θ): the power sum of the symmetric-power root
/// multiset, real by the h ↔ γ-h pairing. At j = 1 this is the Chebyshev-type
/// quantity with r₁ sin θ = sin((γ+1)θ).
pub fn power_sum_cos(gamma: u32, j: u32, theta: f64) -> f64 {
    let g = gamma as i64;
    (0..=g).map(|h| ((j as f64) * (g - 2 * h) as f64 * theta).cos()).sum()
}

/// One prime's local curve θ ↦ z_n(θ) at fixed σ, with its Taylor data.
#[derive(Clone, Debug)]
pub struct LocalCurve {
    prime: u64,
    sigma: f64,
    roots: Vec<Complex64>,
    /// r_j for j = 1..=J (power sums over roots divided by j)
    r: Vec<Complex64>,
    /// c_j = r_j p^{-jσ}: Fourier coefficients of θ ↦ z(θ)
    coeffs: Vec<Complex64>,
}

impl LocalCurve {
    pub fn new(prime: u64, sigma: f64, roots: Vec<Complex64>) -> Result<Self> {
        if sigma <= 0.0 {
            return Err(Error::Singularity(format!(
                "sigma = {sigma} <= 0: local factor has no principal branch"
            )));
        }
        let max_a = roots.iter().map(|a| a.norm()).fold(0.0f64, f64::max);
        let x = (prime as f64).powf(-sigma) * max_a;
        if !roots.is_empty() && x >= 1.0 {
            return Err(Error::Singularity(format!(
                "p^-sigma * max|a| = {x} >= 1 at p = {prime}, sigma = {sigma}"
            )));
        }
        let jmax = if roots.is_empty() {
            0
        } else {
            taylor_truncation(roots.len(), (prime as f64).powf(-sigma))
        };
        let psig = (prime as f64).powf(-sigma);
        let mut r = Vec::with_capacity(jmax);
        let mut coeffs = Vec::with_capacity(jmax);
        let mut pj = psig;
        for j in 1..=jmax {
            let s: Complex64 = roots.iter().map(|a| a.powu(j as u32)).sum();
            let rj = s / j as f64;
            r.push(rj);
            coeffs.push(rj * pj);
            pj *= psig;
        }
        Ok(LocalCurve {
            prime,
            sigma,
            roots,
            r,
            coeffs,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn taylor_r(&self, j: usize) -> Option<Complex64> {
        self.r.get(j - 1).copied()
    }

    pub fn r1(&self) -> Complex64 {
        self.r.first().copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Direct evaluation through the principal logarithm.
    pub fn eval_direct(&self, theta: f64) -> Complex64 {
        let q = Complex64::from_polar((self.prime as f64).powf(-self.sigma), TAU * theta);
        -self
            .roots
            .iter()
            .map(|a| (Complex64::new(1.0, 0.0) - a * q).ln())
            .sum::<Complex64>()
    }

    /// Evaluation by the truncated Fourier/Taylor series
    /// Σ_j r_j p^{-jσ} e^{2πijθ} (Horner in e^{2πiθ}).
    pub fn eval_taylor(&self, theta: f64) -> Complex64 {
        let e = Complex64::from_polar(1.0, TAU * theta);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = (acc + c) * e;
        }
        acc
    }

    /// ⟨z(θ), w⟩ = Re z Re w + Im z Im w via the Taylor series.
    pub fn pairing(&self, theta: f64, w: Complex64) -> f64 {
        let z = self.eval_taylor(theta);
        z.re * w.re + z.im * w.im
    }

    /// Directional projection g_τ(θ) = Re(z(θ) e^{-iτ}) and its first two
    /// θ-derivatives, from the Fourier series.
    pub fn g_tau(&self, theta: f64, tau: f64) -> f64 {
        let mut acc = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let ang = c.arg() + TAU * (j as f64 + 1.0) * theta - tau;
            acc += c.norm() * ang.cos();
        }
        acc
    }

    pub fn g_tau_d1(&self, theta: f64, tau: f64) -> f64 {
        let mut acc = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let omega = TAU * (j as f64 + 1.0);
            let ang = c.arg() + omega * theta - tau;
            acc -= c.norm() * omega * ang.sin();
        }
        acc
    }

    pub fn g_tau_d2(&self, theta: f64, tau: f64) -> f64 {
        let mut acc = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let omega = TAU * (j as f64 + 1.0);
            let ang = c.arg() + omega * theta - tau;
            acc -= c.norm() * omega * omega * ang.cos();
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{hecke_table, HeckeTable};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn small_primes() -> Arc<PrimeTable> {
        Arc::new(crate::arith::sieve_primes(10_000).unwrap())
    }

    fn delta_spec_table() -> Arc<HeckeTable> {
        Arc::new(hecke_table(10_000).unwrap())
    }

    #[test]
    fn zeta_taylor_coefficients() {
        let spec = EulerProductSpec::zeta_with_primes(small_primes());
        for n in [1usize, 5, 100] {
            for j in [1u32, 2, 7] {
                let r = spec.taylor_r(j, n).unwrap();
                assert_abs_diff_eq!(r.re, 1.0 / j as f64, epsilon = 1e-15);
                assert_eq!(r.im, 0.0);
            }
        }
    }

    #[test]
    fn zeta_curve_values() {
        let spec = EulerProductSpec::zeta_with_primes(small_primes());
        let curve = spec.local_curve(1, 1.0).unwrap();
        // z(0) = -log(1 - 1/2) = log 2
        let z0 = curve.eval_direct(0.0);
        assert_abs_diff_eq!(z0.re, std::f64::consts::LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(z0.im, 0.0, epsilon = 1e-15);
        // z(1/2) = -log(1 + 1/2)
        let zh = curve.eval_direct(0.5);
        assert_abs_diff_eq!(zh.re, -(1.5f64.ln()), epsilon = 1e-15);
    }

    #[test]
    fn curve_mean_is_zero() {
        let spec = EulerProductSpec::zeta_with_primes(small_primes());
        let curve = spec.local_curve(1, 1.0).unwrap();
        // 65-point trapezoid over the period
        let m = 65usize;
        let mean = (0..m)
            .map(|i| curve.eval_direct(i as f64 / m as f64))
            .sum::<Complex64>()
            / m as f64;
        assert!(mean.norm() < 1e-12, "mean = {mean}");
    }

    #[test]
    fn taylor_reconstruction_matches_direct() {
        let table = delta_spec_table();
        let specs = vec![
            EulerProductSpec::zeta_with_primes(small_primes()),
            EulerProductSpec::modular_with_primes(table.clone(), small_primes()).unwrap(),
            EulerProductSpec::sympow_with_primes(table, 3, small_primes()).unwrap(),
        ];
        for spec in &specs {
            for (n, sigma) in [(1usize, 0.75), (4, 0.6), (25, 1.2)] {
                let curve = spec.local_curve(n, sigma).unwrap();
                for i in 0..37 {
                    let theta = i as f64 / 37.0;
                    let d = curve.eval_direct(theta);
                    let t = curve.eval_taylor(theta);
                    assert!(
                        (d - t).norm() < 1e-10,
                        "{} n={n} sigma={sigma} theta={theta}: {d} vs {t}",
                        spec.name()
                    );
                }
            }
        }
    }

    #[test]
    fn modular_r1_r2_reduce_to_lambda() {
        let table = delta_spec_table();
        let spec = EulerProductSpec::modular_with_primes(table.clone(), small_primes()).unwrap();
        for n in 1..=50usize {
            let p = spec.prime(n).unwrap();
            let lambda = table.get(p).unwrap().lambda;
            let r1 = spec.taylor_r(1, n).unwrap();
            let r2 = spec.taylor_r(2, n).unwrap();
            assert_abs_diff_eq!(r1.re, lambda, epsilon = 1e-12);
            assert_abs_diff_eq!(r2.re, (lambda * lambda - 2.0) / 2.0, epsilon = 1e-12);
            assert_eq!(r1.im, 0.0);
        }
    }

    #[test]
    fn modular_lambda_two_gives_double_zeta_factor() {
        let table =
            Arc::new(HeckeTable::from_lambdas("synthetic", 12, 1, &[(2, 2.0)]).unwrap());
        let spec = EulerProductSpec::modular_with_primes(table, small_primes()).unwrap();
        let roots = spec.roots_at(1).unwrap();
        assert_eq!(roots.len(), 2);
        for r in roots {
            assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn sympow_r1_is_lambda_squared_minus_one() {
        let table = delta_spec_table();
        let spec = EulerProductSpec::sympow_with_primes(table.clone(), 2, small_primes()).unwrap();
        for n in 1..=50usize {
            let p = spec.prime(n).unwrap();
            let lambda = table.get(p).unwrap().lambda;
            let r1 = spec.taylor_r(1, n).unwrap();
            assert_abs_diff_eq!(r1.re, lambda * lambda - 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sympow_theta_half_pi() {
        // θ = π/2 (λ = 0), γ = 2: roots {-1, 1, -1}, r₁ = -1
        let table = Arc::new(HeckeTable::from_lambdas("synthetic", 12, 1, &[(2, 0.0)]).unwrap());
        let spec = EulerProductSpec::sympow_with_primes(table, 2, small_primes()).unwrap();
        let roots = spec.roots_at(1).unwrap();
        let mut re: Vec<f64> = roots.iter().map(|r| r.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] + 1.0).abs() < 1e-12);
        assert!((re[2] - 1.0).abs() < 1e-12);
        let r1 = spec.taylor_r(1, 1).unwrap();
        assert_abs_diff_eq!(r1.re, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn sympow_rejects_gamma_below_two() {
        let table = delta_spec_table();
        assert!(matches!(
            EulerProductSpec::sympow_with_primes(table, 1, small_primes()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sympow_roots_unimodular_real_r_and_conjugate_closed() {
        let table = delta_spec_table();
        for gamma in [2u32, 3, 5, 8] {
            let spec =
                EulerProductSpec::sympow_with_primes(table.clone(), gamma, small_primes()).unwrap();
            for n in [1usize, 7, 40] {
                let roots = spec.roots_at(n).unwrap();
                assert_eq!(roots.len(), gamma as usize + 1);
                for r in &roots {
                    assert!((r.norm() - 1.0).abs() < 1e-14);
                    assert!(roots.iter().any(|s| (s - r.conj()).norm() < 1e-12));
                }
                for j in 1..=10u32 {
                    let r = spec.taylor_r(j, n).unwrap();
                    assert!(r.im.abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn chebyshev_identity_bulk() {
        // (Σ_h cos((γ-2h)θ)) sin θ = sin((γ+1)θ)
        for gamma in 1..=10u32 {
            for i in 0..1000 {
                let theta = (i as f64 + 0.5) * std::f64::consts::PI / 1000.0;
                let lhs = power_sum_cos(gamma, 1, theta) * theta.sin();
                let rhs = ((gamma as f64 + 1.0) * theta).sin();
                assert!(
                    (lhs - rhs).abs() < 1e-12,
                    "gamma={gamma} theta={theta}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn r1_dominates_sine_bound() {
        let table = delta_spec_table();
        for gamma in 2..=10u32 {
            let spec =
                EulerProductSpec::sympow_with_primes(table.clone(), gamma, small_primes()).unwrap();
            for n in 1..=100usize {
                let p = spec.prime(n).unwrap();
                let theta = table.get(p).unwrap().theta;
                let r1 = spec.taylor_r(1, n).unwrap().re;
                let s = ((gamma as f64 + 1.0) * theta).sin();
                assert!(
                    r1.abs() + 1e-12 >= s.abs(),
                    "gamma={gamma} p={p}: |r1|={} < |sin|={}",
                    r1.abs(),
                    s.abs()
                );
            }
        }
    }

    #[test]
    fn curve_rejects_branch_violation() {
        let spec = EulerProductSpec::zeta_with_primes(small_primes());
        assert!(matches!(
            spec.local_curve(1, 0.0),
            Err(Error::Singularity(_))
        ));
        assert!(matches!(
            spec.local_curve(1, -0.5),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn prime_beyond_table_is_incomplete_data() {
        let table = Arc::new(HeckeTable::from_lambdas("tiny", 12, 1, &[(2, 0.5), (3, -0.3)]).unwrap());
        let spec = EulerProductSpec::modular_with_primes(table, small_primes()).unwrap();
        assert_eq!(spec.max_prime_index(), 2);
        assert!(matches!(spec.roots_at(3), Err(Error::IncompleteData(_))));
    }

    #[test]
    fn sympow_skips_bad_primes() {
        let table = Arc::new(
            HeckeTable::from_lambdas("lvl6", 12, 6, &[(2, 0.5), (3, -0.3), (5, 1.0)]).unwrap(),
        );
        let spec = EulerProductSpec::sympow_with_primes(table, 2, small_primes()).unwrap();
        assert_eq!(spec.skipped_primes(3), vec![2, 3]);
        assert!(spec.roots_at(1).unwrap().is_empty());
        assert_eq!(spec.roots_at(3).unwrap().len(), 3);
    }

    proptest! {
        #[test]
        fn taylor_r_respects_degree_bound(gamma in 2u32..=10, j in 1u32..=30, lam in -2.0f64..2.0) {
            let table = Arc::new(HeckeTable::from_lambdas("prop", 12, 1, &[(2, lam)]).unwrap());
            let spec = EulerProductSpec::sympow_with_primes(table, gamma, small_primes()).unwrap();
            let r = spec.taylor_r(j, 1).unwrap();
            let bound = (gamma as f64 + 1.0) / j as f64;
            prop_assert!(r.norm() <= bound + 1e-12);
        }

        #[test]
        fn synthetic_power_sums_respect_degree_bound(
            args in proptest::collection::vec(0.0f64..1.0, 1..6),
            j in 1u32..=30,
        ) {
            let roots: Vec<Complex64> = args
                .iter()
                .map(|&t| Complex64::from_polar(1.0, TAU * t))
                .collect();
            let g = roots.len() as f64;
            let spec = EulerProductSpec::synthetic_with_primes(
                "prop", roots, 0.5, small_primes()).unwrap();
            let r = spec.taylor_r(j, 1).unwrap();
            prop_assert!(r.norm() <= g / j as f64 + 1e-12);
        }
    }
}
