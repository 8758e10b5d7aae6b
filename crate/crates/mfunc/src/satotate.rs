//! Interval systems where |sin((γ+1)θ)| ≥ sin ξ, their closed-form endpoint
//! sums, the Sato-Tate measure of intervals, and empirical prime-angle
//! densities against a Hecke table.
//!
//! The blocks are
//! A(j) = [(2πj+ξ)/(γ+1), (2πj+π-ξ)/(γ+1)] and
//! B(j) = [(2πj+π+ξ)/(γ+1), (2πj+2π-ξ)/(γ+1)]; odd γ uses j = 0..(γ-1)/2 of
//! both kinds, even γ stops at j = (γ-2)/2 and appends the final A(γ/2).
//! The total length is always π - 2ξ and the 2θ-sine endpoint sum telescopes
//! to zero, so the Sato-Tate measure of the union is 1 - 2ξ/π for every γ.

use std::f64::consts::PI;

use serde::Serialize;

use crate::arith::HeckeTable;
use crate::error::{Error, Result};

/// Union of the closed subintervals of [0, π] where the first symmetric-power
/// Taylor coefficient is forced away from zero: θ is in the system iff
/// |sin((γ+1)θ)| ≥ η = sin ξ.
#[derive(Clone, Debug)]
pub struct IntervalSystem {
    pub gamma: u32,
    pub xi: f64,
    pub eta: f64,
    /// disjoint closed intervals, ascending
    intervals: Vec<(f64, f64)>,
}

impl IntervalSystem {
    pub fn blocks(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.intervals
            .iter()
            .any(|&(a, b)| theta >= a && theta <= b)
    }

    /// Σ (b - a) over the blocks.
    pub fn endpoint_length_sum(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    /// Σ (sin 2b - sin 2a) over the blocks.
    pub fn endpoint_sine_sum(&self) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| (2.0 * b).sin() - (2.0 * a).sin())
            .sum()
    }
}

/// Build the interval system for γ ≥ 1 and 0 < ξ < π/2.
pub fn build_intervals(gamma: u32, xi: f64) -> Result<IntervalSystem> {
    if gamma == 0 {
        return Err(Error::Domain("gamma must be at least 1".into()));
    }
    if !(xi > 0.0 && xi < PI / 2.0) {
        return Err(Error::Domain(format!(
            "xi must lie in (0, pi/2), got {xi}"
        )));
    }
    let d = gamma as f64 + 1.0;
    let a_block = |j: f64| ((2.0 * PI * j + xi) / d, (2.0 * PI * j + PI - xi) / d);
    let b_block = |j: f64| {
        (
            (2.0 * PI * j + PI + xi) / d,
            (2.0 * PI * j + 2.0 * PI - xi) / d,
        )
    };
    let mut intervals = Vec::new();
    if gamma % 2 == 1 {
        for j in 0..=(gamma - 1) / 2 {
            intervals.push(a_block(j as f64));
            intervals.push(b_block(j as f64));
        }
    } else {
        for j in 0..gamma / 2 {
            intervals.push(a_block(j as f64));
            intervals.push(b_block(j as f64));
        }
        intervals.push(a_block((gamma / 2) as f64));
    }
    for &(a, b) in &intervals {
        debug_assert!(a < b);
    }
    debug_assert!(intervals.windows(2).all(|w| w[0].1 < w[1].0));
    debug_assert!(intervals.first().unwrap().0 >= 0.0);
    debug_assert!(intervals.last().unwrap().1 <= PI);
    Ok(IntervalSystem {
        gamma,
        xi,
        eta: xi.sin(),
        intervals,
    })
}

const CLOSED_FORM_TOL: f64 = 1e-12;

/// Total block length: π - 2ξ in closed form, cross-checked against the
/// explicit endpoint sum.
pub fn closed_form_s(system: &IntervalSystem) -> Result<f64> {
    let closed = PI - 2.0 * system.xi;
    let summed = system.endpoint_length_sum();
    if (closed - summed).abs() > CLOSED_FORM_TOL {
        return Err(Error::InternalConsistency(format!(
            "interval length sum {summed} differs from closed form {closed}"
        )));
    }
    Ok(closed)
}

/// Endpoint sine sum: 0 in closed form, cross-checked against the explicit
/// telescoping sum.
pub fn closed_form_t(system: &IntervalSystem) -> Result<f64> {
    let summed = system.endpoint_sine_sum();
    if summed.abs() > CLOSED_FORM_TOL {
        return Err(Error::InternalConsistency(format!(
            "endpoint sine sum {summed} is not zero"
        )));
    }
    Ok(0.0)
}

/// Sato-Tate measure of [a, b] ⊆ [0, π]:
/// (2/π) ∫_a^b sin²θ dθ = (1/π)(b - a - (sin 2b - sin 2a)/2).
pub fn st_ratio(a: f64, b: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&a) || !(0.0..=PI).contains(&b) || a > b {
        return Err(Error::Domain(format!(
            "need 0 <= a <= b <= pi, got [{a}, {b}]"
        )));
    }
    Ok((b - a - ((2.0 * b).sin() - (2.0 * a).sin()) / 2.0) / PI)
}

/// Sato-Tate measure of the whole system (equals 1 - 2ξ/π by the closed
/// forms).
pub fn st_ratio_system(system: &IntervalSystem) -> Result<f64> {
    let mut acc = 0.0;
    for &(a, b) in system.blocks() {
        acc += st_ratio(a, b)?;
    }
    Ok(acc)
}

/// Fraction of primes p ≤ x with θ_f(p) inside the system.
pub fn empirical_fraction(table: &HeckeTable, system: &IntervalSystem, x: u64) -> Result<f64> {
    if x > table.prime_limit {
        return Err(Error::IncompleteData(format!(
            "x = {x} beyond the table limit {}",
            table.prime_limit
        )));
    }
    let mut total = 0u64;
    let mut inside = 0u64;
    for (&p, e) in table.iter() {
        if p > x {
            break;
        }
        total += 1;
        if system.contains(e.theta) {
            inside += 1;
        }
    }
    if total == 0 {
        return Err(Error::EmptyDomain(format!("no primes up to {x} in table")));
    }
    Ok(inside as f64 / total as f64)
}

/// Empirical density of primes with |λ(p)| > √2 - ε, together with its
/// Sato-Tate prediction 2 · st([0, arccos((√2-ε)/2)]).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PfEpsilonReport {
    pub epsilon: f64,
    pub x: u64,
    pub fraction: f64,
    pub predicted: f64,
}

pub fn pf_epsilon_density(table: &HeckeTable, epsilon: f64, x: u64) -> Result<PfEpsilonReport> {
    if !(epsilon > 0.0 && epsilon < std::f64::consts::SQRT_2) {
        return Err(Error::Domain(format!(
            "epsilon must lie in (0, sqrt 2), got {epsilon}"
        )));
    }
    if x > table.prime_limit {
        return Err(Error::IncompleteData(format!(
            "x = {x} beyond the table limit {}",
            table.prime_limit
        )));
    }
    let threshold = std::f64::consts::SQRT_2 - epsilon;
    let mut total = 0u64;
    let mut inside = 0u64;
    for (&p, e) in table.iter() {
        if p > x {
            break;
        }
        total += 1;
        if e.lambda.abs() > threshold {
            inside += 1;
        }
    }
    if total == 0 {
        return Err(Error::EmptyDomain(format!("no primes up to {x} in table")));
    }
    // |2 cos θ| > c on [0, arccos(c/2)) and its mirror image around π/2
    let cut = (threshold / 2.0).acos();
    let predicted = 2.0 * st_ratio(0.0, cut)?;
    Ok(PfEpsilonReport {
        epsilon,
        x,
        fraction: inside as f64 / total as f64,
        predicted,
    })
}

/// JSON record emitted by the command-line front end.
#[derive(Clone, Debug, Serialize)]
pub struct SatoTateRecord {
    pub gamma: u32,
    pub xi: f64,
    pub x: u64,
    pub empirical: f64,
    pub predicted: f64,
    pub abs_error: f64,
}

pub fn sato_tate_record(
    table: &HeckeTable,
    gamma: u32,
    xi: f64,
    x: u64,
) -> Result<SatoTateRecord> {
    let system = build_intervals(gamma, xi)?;
    closed_form_t(&system)?;
    let predicted = closed_form_s(&system)? / PI; // = 1 - 2ξ/π
    let empirical = empirical_fraction(table, &system, x)?;
    Ok(SatoTateRecord {
        gamma,
        xi,
        x,
        empirical,
        predicted,
        abs_error: (empirical - predicted).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::hecke_table;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn gamma_one_quarter_pi_blocks() {
        let sys = build_intervals(1, PI / 4.0).unwrap();
        let b = sys.blocks();
        assert_eq!(b.len(), 2);
        assert_abs_diff_eq!(b[0].0, PI / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[0].1, 3.0 * PI / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[1].0, 5.0 * PI / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[1].1, 7.0 * PI / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn gamma_two_sixth_pi_blocks() {
        let sys = build_intervals(2, PI / 6.0).unwrap();
        let b = sys.blocks();
        assert_eq!(b.len(), 3);
        // final block is A(1) = [(2π+π/6)/3, (3π-π/6)/3]
        assert_abs_diff_eq!(b[2].0, (2.0 * PI + PI / 6.0) / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[2].1, (3.0 * PI - PI / 6.0) / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn block_count_by_parity() {
        for gamma in 1..=12u32 {
            let sys = build_intervals(gamma, 0.3).unwrap();
            assert_eq!(sys.blocks().len() as u32, gamma + 1, "gamma {gamma}");
        }
    }

    #[test]
    fn membership_matches_sine_oracle() {
        // pointwise oracle: θ in the system iff |sin((γ+1)θ)| ≥ sin ξ
        let mut state = 0x5deece66du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for gamma in [1u32, 2, 3, 4, 7, 10] {
            let xi = 0.4;
            let sys = build_intervals(gamma, xi).unwrap();
            for _ in 0..10_000 {
                let theta = next() * PI;
                let oracle = ((gamma as f64 + 1.0) * theta).sin().abs() >= xi.sin();
                // skip the measure-zero boundary where float rounding decides
                let margin =
                    (((gamma as f64 + 1.0) * theta).sin().abs() - xi.sin()).abs();
                if margin < 1e-9 {
                    continue;
                }
                assert_eq!(sys.contains(theta), oracle, "gamma={gamma} theta={theta}");
            }
        }
    }

    #[test]
    fn closed_forms_hold_to_1e12() {
        for gamma in 2..=20u32 {
            for k in 1..=9u32 {
                let xi = k as f64 * PI / 20.0; // nine values in (0, pi/2)
                let sys = build_intervals(gamma, xi).unwrap();
                let s = closed_form_s(&sys).unwrap();
                assert_abs_diff_eq!(s, PI - 2.0 * xi, epsilon = 1e-15);
                assert_eq!(closed_form_t(&sys).unwrap(), 0.0);
                assert!(sys.endpoint_sine_sum().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn odd_gamma_telescoping_identity() {
        // Σ_j (sin(4π(j+1)/(γ+1)) - sin(4πj/(γ+1))) telescopes to sin 2π = 0
        for gamma in (1..=19u32).step_by(2) {
            let d = gamma as f64 + 1.0;
            let sum: f64 = (0..=(gamma - 1) / 2)
                .map(|j| {
                    (4.0 * PI * (j as f64 + 1.0) / d).sin() - (4.0 * PI * j as f64 / d).sin()
                })
                .sum();
            assert!(sum.abs() < 1e-12, "gamma {gamma}: {sum}");
        }
    }

    #[test]
    fn even_gamma_cosine_sum_is_minus_half() {
        for gamma in (2..=20u32).step_by(2) {
            let d = gamma as f64 + 1.0;
            let sum: f64 = (0..=(gamma - 2) / 2)
                .map(|j| ((4.0 * PI * j as f64 + 2.0 * PI) / d).cos())
                .sum();
            assert_abs_diff_eq!(sum, -0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn st_ratio_trivials() {
        assert_abs_diff_eq!(st_ratio(0.0, PI).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(st_ratio(0.0, PI / 2.0).unwrap(), 0.5, epsilon = 1e-15);
        assert!(st_ratio(-0.1, 1.0).is_err());
        assert!(st_ratio(1.0, 0.5).is_err());
    }

    #[test]
    fn st_ratio_system_total() {
        for gamma in 1..=10u32 {
            for xi in [0.2, PI / 4.0, 1.3] {
                let sys = build_intervals(gamma, xi).unwrap();
                let total = st_ratio_system(&sys).unwrap();
                assert_abs_diff_eq!(total, 1.0 - 2.0 * xi / PI, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn empirical_fraction_trivial_cases() {
        let table = hecke_table(100_000).unwrap();
        // I = [0, π] (xi -> 0 limit): every prime counts
        let sys = build_intervals(3, 1e-9).unwrap();
        let f = empirical_fraction(&table, &sys, 100_000).unwrap();
        assert!(f > 0.999, "fraction {f}");
        // beyond the table
        assert!(matches!(
            empirical_fraction(&table, &sys, 1_000_000),
            Err(Error::IncompleteData(_))
        ));
    }

    #[test]
    fn empirical_fraction_monotone_in_xi() {
        let table = hecke_table(20_000).unwrap();
        let mut prev = 1.0f64;
        for k in 1..=6 {
            let xi = k as f64 * 0.24;
            let sys = build_intervals(3, xi).unwrap();
            let f = empirical_fraction(&table, &sys, 20_000).unwrap();
            assert!(f <= prev + 1e-12, "xi {xi}: {f} > {prev}");
            prev = f;
        }
    }

    #[test]
    fn pf_epsilon_near_sqrt2_covers_almost_everything() {
        let table = hecke_table(20_000).unwrap();
        let rep = pf_epsilon_density(&table, std::f64::consts::SQRT_2 - 1e-9, 20_000).unwrap();
        // condition is |λ| > ~0: only measure-zero angles fail
        assert!(rep.fraction > 0.999);
        assert!(rep.predicted > 0.999);
        assert!(pf_epsilon_density(&table, 2.0, 20_000).is_err());
    }

    #[test]
    fn satotate_record_fields() {
        let table = hecke_table(50_000).unwrap();
        let rec = sato_tate_record(&table, 2, PI / 6.0, 50_000).unwrap();
        assert_abs_diff_eq!(rec.predicted, 2.0 / 3.0, epsilon = 1e-15);
        assert!(rec.abs_error < 0.05, "desk-scale error {}", rec.abs_error);
    }

    proptest! {
        #[test]
        fn st_ratio_additive(a in 0.0f64..PI, b in 0.0f64..PI, c in 0.0f64..PI) {
            let mut v = [a, b, c];
            v.sort_by(f64::total_cmp);
            let whole = st_ratio(v[0], v[2]).unwrap();
            let parts = st_ratio(v[0], v[1]).unwrap() + st_ratio(v[1], v[2]).unwrap();
            prop_assert!((whole - parts).abs() < 1e-12);
        }
    }
}
