//! Command-line front end: density pipelines, vertical-line sampling,
//! density-vs-sample comparison, Sato-Tate interval statistics, decay tables,
//! and the eigenvalue cache.
//!
//! Exit codes: 0 ok, 2 validation/config, 3 accuracy or quality failure,
//! 4 resource limits, 1 io.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{resolve, FileConfig, RunConfig, SpecSelector};
use mfunc::arith::{DeltaCache, HeckeTable, PrimeTable, DELTA_FORM_ID};
use mfunc::charfun::{decay_profile, CharFnParams, PreflightParams};
use mfunc::empirical::SamplerConfig;
use mfunc::io::{self, Provenance};
use mfunc::pipeline::{run_compare, run_density, CompareParams, DensityParams};
use mfunc::satotate::{pf_epsilon_density, sato_tate_record};
use mfunc::{Error, EulerProductSpec, Result};

#[derive(Parser)]
#[command(
    name = "mfunc",
    version,
    about = "Density functions for the value-distribution of log Euler products"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic-function grid and its Fourier inversion to a density
    Density(DensityArgs),
    /// Histogram of log phi(sigma + it) sampled over t in [-T, T]
    Sample(SampleArgs),
    /// Density pipeline plus sampling plus the discrepancy report
    Compare(CompareArgs),
    /// Sato-Tate interval system: closed forms and empirical prime fractions
    Satotate(SatotateArgs),
    /// Jessen-Wintner decay table for one local factor
    Decay(DecayArgs),
    /// Build or reuse the tau/eigenvalue cache
    Cache(CacheArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default "out")
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Eigenvalue cache directory (env MFUNC_CACHE_DIR, default ".mfunc-cache")
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Worker-thread cap (env MFUNC_THREADS; default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Seed recorded in outputs and used by resampling diagnostics
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// Euler product: zeta | modular | sympow:G
    #[arg(long)]
    spec: Option<String>,
    /// Real part of s on the sampled vertical line
    #[arg(long)]
    sigma: Option<f64>,
    /// Import an external primitive form from an eigenvalue CSV
    #[arg(long)]
    form_file: Option<PathBuf>,
    #[arg(long)]
    form_id: Option<String>,
    #[arg(long)]
    weight: Option<u32>,
    #[arg(long)]
    level: Option<u64>,
    /// Hecke table prime limit (default: smallest limit the run needs)
    #[arg(long)]
    prime_limit: Option<u64>,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Number of local factors in the truncated product
    #[arg(long)]
    charfun_primes: Option<usize>,
    #[arg(long)]
    w_max: Option<f64>,
    #[arg(long)]
    w_nodes: Option<usize>,
    #[arg(long)]
    z_nodes: Option<usize>,
    /// Explicit z rectangle "x0,x1,y0,y1" (default: +-6 standard deviations)
    #[arg(long, value_delimiter = ',', num_args = 4)]
    z_rect: Option<Vec<f64>>,
    /// Hard gate on the first-order tail bound (off by default)
    #[arg(long)]
    tail_tol: Option<f64>,
    /// |r1| threshold for the decay preflight
    #[arg(long)]
    r1_threshold: Option<f64>,
}

#[derive(Args, Clone)]
struct SampleWindowArgs {
    /// Half-length T of the sampled interval [-T, T]
    #[arg(long)]
    t_max: Option<f64>,
    /// Total number of equidistant samples (even)
    #[arg(long)]
    samples: Option<usize>,
    /// Sampler prime cutoff (primes up to this bound enter the sum)
    #[arg(long)]
    cutoff: Option<u64>,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    window: SampleWindowArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    window: SampleWindowArgs,
    /// Gate on the sup-rectangle discrepancy
    #[arg(long)]
    tol_sup: Option<f64>,
    /// Gate on the L1 distance
    #[arg(long)]
    tol_l1: Option<f64>,
}

#[derive(Args)]
struct SatotateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Symmetric power degree
    #[arg(long, default_value_t = 2)]
    gamma: u32,
    /// Interval parameter xi in (0, pi/2)
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_6)]
    xi: f64,
    /// Count primes up to this bound
    #[arg(long, default_value_t = 1_000_000)]
    x: u64,
    /// Also report the density of primes with |lambda| > sqrt(2) - epsilon
    #[arg(long)]
    epsilon: Option<f64>,
    #[command(flatten)]
    spec: SpecArgs,
}

#[derive(Args)]
struct DecayArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    spec: SpecArgs,
    /// The prime whose local factor is probed
    #[arg(long, default_value_t = 2)]
    prime: u64,
    /// Probe radii |w|, ascending
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e2, 1e3, 1e4])]
    radii: Vec<f64>,
    /// Number of equispaced directions for the sup over tau
    #[arg(long, default_value_t = 32)]
    directions: usize,
}

#[derive(Args)]
struct CacheArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 1_000_000)]
    prime_limit: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::Density(a) => cmd_density(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Satotate(a) => cmd_satotate(a),
        Command::Decay(a) => cmd_decay(a),
        Command::Cache(a) => cmd_cache(a),
    }
}

fn init_threads(threads: Option<usize>) {
    let n = threads.or_else(|| {
        std::env::var("MFUNC_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn default_cache_dir() -> PathBuf {
    std::env::var_os("MFUNC_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".mfunc-cache"))
}

/// Assemble the resolved configuration for the pipeline commands.
fn resolve_config(
    common: &CommonArgs,
    spec: &SpecArgs,
    grid: Option<&GridArgs>,
    window: Option<&SampleWindowArgs>,
    tol_sup: Option<f64>,
    tol_l1: Option<f64>,
) -> Result<RunConfig> {
    let file = match &common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let spec_str = resolve(spec.spec.clone(), file.spec.clone(), "zeta".to_string());
    let g = grid;
    let w = window;
    let cfg = RunConfig {
        spec: SpecSelector::parse(&spec_str)?,
        sigma: resolve(spec.sigma, file.sigma, 1.2),
        charfun_primes: resolve(g.and_then(|g| g.charfun_primes), file.charfun_primes, 1000),
        w_max: resolve(g.and_then(|g| g.w_max), file.w_max, 60.0),
        w_nodes: resolve(g.and_then(|g| g.w_nodes), file.w_nodes, 513),
        z_nodes: resolve(g.and_then(|g| g.z_nodes), file.z_nodes, 0), // 0 = per-command default
        z_rect: match g.and_then(|g| g.z_rect.clone()) {
            Some(v) => Some([v[0], v[1], v[2], v[3]]),
            None => file.z_rect,
        },
        t_max: resolve(w.and_then(|w| w.t_max), file.t_max, 1e4),
        samples: resolve(w.and_then(|w| w.samples), file.samples, 200_000),
        cutoff: resolve(w.and_then(|w| w.cutoff), file.cutoff, 10_000),
        seed: resolve(common.seed, file.seed, 0),
        out_dir: resolve(common.out_dir.clone(), file.out_dir.clone(), PathBuf::from("out")),
        cache_dir: resolve(
            common.cache_dir.clone(),
            file.cache_dir.clone(),
            default_cache_dir(),
        ),
        prime_limit: spec.prime_limit.or(file.prime_limit),
        tol_sup: resolve(tol_sup, file.tol_sup, 0.02),
        tol_l1: resolve(tol_l1, file.tol_l1, 0.05),
        tail_tol: g.and_then(|g| g.tail_tol).or(file.tail_tol),
        r1_threshold: resolve(g.and_then(|g| g.r1_threshold), file.r1_threshold, 0.3),
        form_file: spec.form_file.clone().or(file.form_file.clone()),
        form_id: resolve(
            spec.form_id.clone(),
            file.form_id.clone(),
            DELTA_FORM_ID.to_string(),
        ),
        weight: resolve(spec.weight, file.weight, 12),
        level: resolve(spec.level, file.level, 1),
    };
    init_threads(common.threads.or(file.threads));
    cfg.validate()?;
    Ok(cfg)
}

/// Build the Euler-product spec, constructing or loading the Hecke table when
/// one is needed. `needed_prime` is the largest prime the run will touch.
fn build_spec(cfg: &RunConfig, needed_prime: u64) -> Result<EulerProductSpec> {
    let table_limit = cfg.prime_limit.unwrap_or(needed_prime).max(needed_prime);
    let sieve_limit = table_limit.max(1_000_000);
    let primes = Arc::new(mfunc::sieve_primes(sieve_limit)?);
    match cfg.spec {
        SpecSelector::Zeta => Ok(EulerProductSpec::zeta_with_primes(primes)),
        SpecSelector::Modular | SpecSelector::SymPow(_) => {
            let table = Arc::new(load_table(cfg, table_limit)?);
            match cfg.spec {
                SpecSelector::Modular => EulerProductSpec::modular_with_primes(table, primes),
                SpecSelector::SymPow(g) => {
                    EulerProductSpec::sympow_with_primes(table, g, primes)
                }
                SpecSelector::Zeta => unreachable!(),
            }
        }
    }
}

fn load_table(cfg: &RunConfig, table_limit: u64) -> Result<HeckeTable> {
    match &cfg.form_file {
        Some(path) => {
            let t = HeckeTable::read_csv(path, &cfg.form_id, cfg.weight, cfg.level)?;
            if t.prime_limit < table_limit {
                return Err(Error::IncompleteData(format!(
                    "form file covers primes up to {} but the run needs {}",
                    t.prime_limit, table_limit
                )));
            }
            Ok(t)
        }
        None => {
            let cache = DeltaCache::new(&cfg.cache_dir);
            let start = Instant::now();
            let (table, built) = cache.load_or_build(table_limit)?;
            if built {
                eprintln!(
                    "built tau/eigenvalue cache to prime limit {table_limit} in {:.1}s",
                    start.elapsed().as_secs_f64()
                );
            }
            Ok(table)
        }
    }
}

/// Largest prime among the first `n` (1-based); errors if the sieve is short.
fn nth_prime(primes: &PrimeTable, n: usize) -> Result<u64> {
    primes.nth(n)
}

fn prime_for_index(n: usize) -> Result<u64> {
    // generous sieve: p_n < n (ln n + ln ln n) + margin for n >= 6
    let nf = n.max(6) as f64;
    let bound = (nf * (nf.ln() + nf.ln().ln()) * 1.2) as u64 + 100;
    let primes = mfunc::sieve_primes(bound)?;
    nth_prime(&primes, n)
}

fn label(spec: &EulerProductSpec, sigma: f64) -> String {
    format!("{}_s{}", spec.name(), sigma)
}

fn provenance(cfg: &RunConfig) -> Provenance {
    let mut p = Provenance::new();
    p.config_hash = Some(cfg.hash());
    p.seed = Some(cfg.seed);
    p
}

fn density_params(cfg: &RunConfig, default_z_nodes: usize) -> Result<DensityParams> {
    let mut p = DensityParams::new(cfg.sigma);
    p.n_primes = cfg.charfun_primes;
    p.w_max = cfg.w_max;
    p.w_nodes = cfg.w_nodes;
    p.z_nodes = if cfg.z_nodes == 0 { default_z_nodes } else { cfg.z_nodes };
    p.z_rect = cfg.z_rectangle()?;
    p.tail_tolerance = cfg.tail_tol;
    p.preflight = PreflightParams {
        r1_threshold: cfg.r1_threshold,
        ..PreflightParams::default()
    };
    Ok(p)
}

#[derive(Serialize)]
struct EnvelopeSummary {
    prime: u64,
    r1_abs: f64,
    decades: Vec<f64>,
    envelopes: Vec<f64>,
    ratio: f64,
}

#[derive(Serialize)]
struct DensityDiagnostics<'a> {
    config: &'a RunConfig,
    config_hash: String,
    preflight_passing: Vec<u64>,
    preflight_envelopes: Vec<EnvelopeSummary>,
    tail_bound: f64,
    norm_defect: f64,
    clip_mass: f64,
    im_residue: f64,
    heuristic: bool,
    skipped_primes: Vec<u64>,
}

fn write_density_outputs(
    cfg: &RunConfig,
    spec: &EulerProductSpec,
    run: &mfunc::pipeline::DensityRun,
) -> Result<()> {
    let prov = provenance(cfg);
    let lbl = label(spec, cfg.sigma);
    let dir = &cfg.out_dir;
    io::write_text(&dir.join(format!("{lbl}_charfn.csv")), &io::charfn_csv(&run.charfn))?;
    io::write_text(
        &dir.join(format!("{lbl}_charfn.json")),
        &io::charfn_sidecar(&run.charfn, &prov),
    )?;
    io::write_text(
        &dir.join(format!("{lbl}_density.csv")),
        &io::density_csv(&run.density),
    )?;
    io::write_text(
        &dir.join(format!("{lbl}_density.json")),
        &io::density_sidecar(&run.density, &prov),
    )?;
    io::write_text(
        &dir.join(format!("{lbl}_density.matrix.dat")),
        &io::density_gnuplot_matrix(&run.density),
    )?;
    let diag = DensityDiagnostics {
        config: cfg,
        config_hash: cfg.hash(),
        preflight_passing: run.preflight.passing.clone(),
        preflight_envelopes: run
            .preflight
            .envelopes
            .iter()
            .map(|e| EnvelopeSummary {
                prime: e.prime,
                r1_abs: e.r1_abs,
                decades: e.decades.clone(),
                envelopes: e.envelopes.clone(),
                ratio: e.ratio(),
            })
            .collect(),
        tail_bound: run.charfn.tail_bound,
        norm_defect: run.density.norm_defect,
        clip_mass: run.density.clip_mass,
        im_residue: run.density.im_residue,
        heuristic: run.density.heuristic,
        skipped_primes: run.charfn.skipped_primes.clone(),
    };
    io::write_text(
        &dir.join(format!("{lbl}_diagnostics.json")),
        &serde_json::to_string_pretty(&diag).expect("diagnostics"),
    )?;
    Ok(())
}

fn cmd_density(a: DensityArgs) -> Result<()> {
    let cfg = resolve_config(&a.common, &a.spec, Some(&a.grid), None, None, None)?;
    let needed = prime_for_index(cfg.charfun_primes)?;
    let spec = build_spec(&cfg, needed)?;
    let params = density_params(&cfg, 129)?;
    let start = Instant::now();
    let run = run_density(&spec, &params)?;
    eprintln!(
        "density pipeline for {} at sigma {} finished in {:.1}s",
        spec.name(),
        cfg.sigma,
        start.elapsed().as_secs_f64()
    );
    write_density_outputs(&cfg, &spec, &run)?;
    println!(
        "{}: norm_defect {:.3e}, clip_mass {:.3e}, tail_bound {:.3e}, heuristic {}",
        label(&spec, cfg.sigma),
        run.density.norm_defect,
        run.density.clip_mass,
        run.charfn.tail_bound,
        run.density.heuristic
    );
    if !run.charfn.skipped_primes.is_empty() {
        println!("skipped bad primes: {:?}", run.charfn.skipped_primes);
    }
    Ok(())
}

fn cmd_sample(a: SampleArgs) -> Result<()> {
    let cfg = resolve_config(
        &a.common,
        &a.spec,
        Some(&a.grid),
        Some(&a.window),
        None,
        None,
    )?;
    let needed = prime_for_index(cfg.charfun_primes)?.max(cfg.cutoff);
    let spec = build_spec(&cfg, needed)?;
    let geom = {
        let params = density_params(&cfg, 33)?;
        let rect = match params.z_rect {
            Some(r) => r,
            None => mfunc::density::auto_rectangle(&spec, cfg.sigma, params.n_primes, 6.0)?,
        };
        mfunc::GridGeometry::new(rect, params.z_nodes, params.z_nodes)?
    };
    let sampler = SamplerConfig {
        t_max: cfg.t_max,
        samples: cfg.samples,
        prime_cutoff: cfg.cutoff,
        seed: cfg.seed,
    };
    let hist = mfunc::build_histogram(&spec, cfg.sigma, &sampler, geom)?;
    let prov = provenance(&cfg);
    let lbl = label(&spec, cfg.sigma);
    io::write_text(
        &cfg.out_dir.join(format!("{lbl}_hist.csv")),
        &io::histogram_csv(&hist),
    )?;
    io::write_text(
        &cfg.out_dir.join(format!("{lbl}_hist.json")),
        &io::histogram_sidecar(&hist, &prov),
    )?;
    println!(
        "{lbl}: {} samples, {} out of range, heuristic {}",
        hist.total(),
        hist.out_of_range,
        hist.heuristic
    );
    Ok(())
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    let cfg = resolve_config(
        &a.common,
        &a.spec,
        Some(&a.grid),
        Some(&a.window),
        a.tol_sup,
        a.tol_l1,
    )?;
    let needed = prime_for_index(cfg.charfun_primes)?.max(cfg.cutoff);
    let spec = build_spec(&cfg, needed)?;
    let mut params = CompareParams::new(cfg.sigma);
    params.density = density_params(&cfg, 33)?;
    params.sampler = SamplerConfig {
        t_max: cfg.t_max,
        samples: cfg.samples,
        prime_cutoff: cfg.cutoff,
        seed: cfg.seed,
    };
    let start = Instant::now();
    let out = run_compare(&spec, &params)?;
    eprintln!(
        "compare pipeline for {} at sigma {} finished in {:.1}s",
        spec.name(),
        cfg.sigma,
        start.elapsed().as_secs_f64()
    );
    write_density_outputs(&cfg, &spec, &out.run)?;
    let prov = provenance(&cfg);
    let lbl = label(&spec, cfg.sigma);
    io::write_text(
        &cfg.out_dir.join(format!("{lbl}_hist.csv")),
        &io::histogram_csv(&out.histogram),
    )?;
    io::write_text(
        &cfg.out_dir.join(format!("{lbl}_hist.json")),
        &io::histogram_sidecar(&out.histogram, &prov),
    )?;
    io::write_text(
        &cfg.out_dir.join(format!("{lbl}_compare.json")),
        &io::compare_report_json(spec.name(), cfg.sigma, &out.report, &prov),
    )?;
    println!(
        "{lbl}: sup_rect {:.4}, l1 {:.4} over {} rectangles ({} samples)",
        out.report.sup_rect, out.report.l1, out.report.rect_family_size, out.report.sample_count
    );
    if out.report.sup_rect > cfg.tol_sup || out.report.l1 > cfg.tol_l1 {
        return Err(Error::Quality(format!(
            "discrepancy exceeds tolerance: sup_rect {:.4} (tol {}), l1 {:.4} (tol {})",
            out.report.sup_rect, cfg.tol_sup, out.report.l1, cfg.tol_l1
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct SatotateOutput {
    record: mfunc::satotate::SatoTateRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pf_epsilon: Option<mfunc::satotate::PfEpsilonReport>,
    config_hash: String,
    provenance: Provenance,
}

fn cmd_satotate(a: SatotateArgs) -> Result<()> {
    let cfg = resolve_config(&a.common, &a.spec, None, None, None, None)?;
    if a.gamma < 1 {
        return Err(Error::Domain("gamma must be at least 1".into()));
    }
    let table = load_table(&cfg, cfg.prime_limit.unwrap_or(a.x).max(a.x))?;
    let record = sato_tate_record(&table, a.gamma, a.xi, a.x)?;
    let pf = match a.epsilon {
        Some(eps) => Some(pf_epsilon_density(&table, eps, a.x)?),
        None => None,
    };
    let out = SatotateOutput {
        record,
        pf_epsilon: pf,
        config_hash: cfg.hash(),
        provenance: provenance(&cfg),
    };
    let json = serde_json::to_string_pretty(&out).expect("satotate json");
    println!("{json}");
    let path = cfg.out_dir.join(format!(
        "satotate_g{}_xi{:.4}_x{}.json",
        a.gamma, a.xi, a.x
    ));
    io::write_text(&path, &json)?;
    Ok(())
}

#[derive(Serialize)]
struct DecayOutput<'a> {
    spec: &'a str,
    sigma: f64,
    prime: u64,
    r1_abs: f64,
    directions: usize,
    rows: Vec<DecayRowOut>,
    provenance: Provenance,
}

#[derive(Serialize)]
struct DecayRowOut {
    radius: f64,
    sup_abs: f64,
    normalized: f64,
}

fn cmd_decay(a: DecayArgs) -> Result<()> {
    let cfg = resolve_config(&a.common, &a.spec, None, None, None, None)?;
    let spec = build_spec(&cfg, a.prime)?;
    let n = spec
        .primes()
        .primes
        .binary_search(&a.prime)
        .map_err(|_| Error::Domain(format!("{} is not prime", a.prime)))?
        + 1;
    let curve = spec.local_curve(n, cfg.sigma)?;
    let dirs: Vec<f64> = (0..a.directions)
        .map(|k| std::f64::consts::TAU * k as f64 / a.directions as f64)
        .collect();
    let prof = decay_profile(&curve, &a.radii, &dirs, &CharFnParams::default())?;
    println!("spec {}  sigma {}  p = {}  |r1| = {:.4}", spec.name(), cfg.sigma, a.prime, prof.r1_abs);
    println!("{:>12}  {:>12}  {:>12}", "radius", "sup|K|", "normalized");
    let mut csv = String::from("radius,sup_abs,normalized\n");
    for row in &prof.rows {
        println!(
            "{:>12.4e}  {:>12.6e}  {:>12.6e}",
            row.radius, row.sup_abs, row.normalized
        );
        csv.push_str(&format!(
            "{},{},{}\n",
            row.radius, row.sup_abs, row.normalized
        ));
    }
    let lbl = format!("decay_{}_p{}_s{}", spec.name(), a.prime, cfg.sigma);
    io::write_text(&cfg.out_dir.join(format!("{lbl}.csv")), &csv)?;
    let sidecar = DecayOutput {
        spec: spec.name(),
        sigma: cfg.sigma,
        prime: a.prime,
        r1_abs: prof.r1_abs,
        directions: a.directions,
        rows: prof
            .rows
            .iter()
            .map(|r| DecayRowOut {
                radius: r.radius,
                sup_abs: r.sup_abs,
                normalized: r.normalized,
            })
            .collect(),
        provenance: provenance(&cfg),
    };
    io::write_text(
        &cfg.out_dir.join(format!("{lbl}.json")),
        &serde_json::to_string_pretty(&sidecar).expect("decay json"),
    )?;
    Ok(())
}

fn cmd_cache(a: CacheArgs) -> Result<()> {
    let cfg = resolve_config(&a.common, &SpecArgs {
        spec: Some("modular".into()),
        sigma: Some(1.0),
        form_file: None,
        form_id: None,
        weight: None,
        level: None,
        prime_limit: Some(a.prime_limit),
    }, None, None, None, None)?;
    let cache = DeltaCache::new(&cfg.cache_dir);
    let start = Instant::now();
    let (table, built) = cache.load_or_build(a.prime_limit)?;
    println!(
        "cache at {} (prime limit {}): {} entries, {}",
        cache.eigenvalue_path(a.prime_limit).display(),
        a.prime_limit,
        table.len(),
        if built {
            format!("built in {:.1}s", start.elapsed().as_secs_f64())
        } else {
            "reused".to_string()
        }
    );
    Ok(())
}
