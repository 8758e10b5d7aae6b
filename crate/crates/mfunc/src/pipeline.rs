//! End-to-end runs: decay preflight → characteristic-function grid →
//! inversion, and the full compare pipeline against sampled values. The
//! command-line front end and the acceptance suite both drive these.

use crate::charfun::{
    decay_preflight, product_charfn, CharFnGrid, CharFnParams, DecayPreflight, PreflightParams,
    WGrid,
};
use crate::density::{auto_rectangle, invert, DensityGrid};
use crate::empirical::{build_histogram, discrepancy, DiscrepancyReport, EmpiricalHistogram, SamplerConfig};
use crate::error::Result;
use crate::euler::EulerProductSpec;
use crate::geom::{GridGeometry, Rectangle};

/// Parameters of a density run. `new(sigma)` fills in the standard desk-scale
/// defaults (1000 primes, |w| ≤ 60 on 513² nodes, z auto-sized to ±6
/// standard deviations on 129² cells).
#[derive(Clone, Debug)]
pub struct DensityParams {
    pub sigma: f64,
    pub n_primes: usize,
    pub w_max: f64,
    pub w_nodes: usize,
    pub z_nodes: usize,
    /// explicit z-rectangle; autosized from the truncation variance if unset
    pub z_rect: Option<Rectangle>,
    pub k_sigma: f64,
    pub tail_tolerance: Option<f64>,
    pub quadrature: CharFnParams,
    pub preflight: PreflightParams,
}

impl DensityParams {
    pub fn new(sigma: f64) -> Self {
        DensityParams {
            sigma,
            n_primes: 1000,
            w_max: 60.0,
            w_nodes: 513,
            z_nodes: 129,
            z_rect: None,
            k_sigma: 6.0,
            tail_tolerance: None,
            quadrature: CharFnParams::default(),
            preflight: PreflightParams::default(),
        }
    }
}

/// Artifacts of a density run.
#[derive(Clone, Debug)]
pub struct DensityRun {
    pub preflight: DecayPreflight,
    pub charfn: CharFnGrid,
    pub density: DensityGrid,
}

/// Preflight, product, and inversion in sequence.
pub fn run_density(spec: &EulerProductSpec, params: &DensityParams) -> Result<DensityRun> {
    let preflight = decay_preflight(spec, params.sigma, &params.preflight)?;
    let grid = WGrid::new(params.w_max, params.w_nodes)?;
    let charfn = product_charfn(
        spec,
        params.sigma,
        params.n_primes,
        grid,
        &params.quadrature,
        params.tail_tolerance,
    )?;
    let rect = match params.z_rect {
        Some(r) => r,
        None => auto_rectangle(spec, params.sigma, params.n_primes, params.k_sigma)?,
    };
    let geom = GridGeometry::new(rect, params.z_nodes, params.z_nodes)?;
    let density = invert(&charfn, geom)?;
    Ok(DensityRun {
        preflight,
        charfn,
        density,
    })
}

/// Parameters of a compare run: a density pipeline plus the sampler. The
/// default z resolution is coarser than a standalone density run (33² cells)
/// so the per-cell statistics at the default sample count stay meaningful.
#[derive(Clone, Debug)]
pub struct CompareParams {
    pub density: DensityParams,
    pub sampler: SamplerConfig,
}

impl CompareParams {
    pub fn new(sigma: f64) -> Self {
        let mut density = DensityParams::new(sigma);
        density.z_nodes = 33;
        CompareParams {
            density,
            sampler: SamplerConfig {
                t_max: 1e4,
                samples: 200_000,
                prime_cutoff: 10_000,
                seed: 0,
            },
        }
    }
}

/// Artifacts of a compare run.
#[derive(Clone, Debug)]
pub struct CompareRun {
    pub run: DensityRun,
    pub histogram: EmpiricalHistogram,
    pub report: DiscrepancyReport,
}

/// Full pipeline: density, then equidistant sampling on the same geometry,
/// then the discrepancy report.
pub fn run_compare(spec: &EulerProductSpec, params: &CompareParams) -> Result<CompareRun> {
    let run = run_density(spec, &params.density)?;
    let histogram = build_histogram(spec, params.density.sigma, &params.sampler, run.density.geom)?;
    let report = discrepancy(&histogram, &run.density)?;
    Ok(CompareRun {
        run,
        histogram,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn small_zeta_compare_pipeline() {
        let primes = Arc::new(crate::arith::sieve_primes(50_000).unwrap());
        let spec = EulerProductSpec::zeta_with_primes(primes);
        let mut params = CompareParams::new(1.2);
        params.density.n_primes = 100;
        params.density.w_nodes = 257;
        params.sampler.samples = 40_000;
        params.sampler.t_max = 2000.0;
        params.sampler.prime_cutoff = 2000;
        let out = run_compare(&spec, &params).unwrap();
        assert!(out.run.density.norm_defect < 1e-3);
        assert!(out.report.sup_rect < 0.05, "sup {}", out.report.sup_rect);
        assert!(!out.report.insufficient_data);
        assert_eq!(out.histogram.total(), 40_000);
    }
}
