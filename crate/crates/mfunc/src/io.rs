//! Portable text serialization for every artifact: CSV payloads plus JSON
//! sidecars carrying the parameters and quality diagnostics. All writers are
//! deterministic — identical inputs give byte-identical output — so
//! reproducibility can be checked by comparing files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::charfun::CharFnGrid;
use crate::density::DensityGrid;
use crate::empirical::{DiscrepancyReport, EmpiricalHistogram};
use crate::error::Result;
use crate::geom::GridGeometry;

/// Run provenance recorded in every sidecar.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new() -> Self {
        Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: None,
            seed: None,
        }
    }
}

#[derive(Serialize)]
struct CharFnSidecar<'a> {
    spec: &'a str,
    sigma: f64,
    n_primes: usize,
    w_max: f64,
    w_nodes: usize,
    tail_bound: f64,
    heuristic: bool,
    skipped_primes: &'a [u64],
    dw_normalization: &'static str,
    provenance: &'a Provenance,
}

/// CSV rows `re_w,im_w,re_val,im_val`, v slowest then u, both ascending.
pub fn charfn_csv(grid: &CharFnGrid) -> String {
    let mut s = String::with_capacity(grid.values.len() * 40 + 32);
    s.push_str("re_w,im_w,re_val,im_val\n");
    for iv in 0..grid.nodes {
        for iu in 0..grid.nodes {
            let w = grid.node_w(iu, iv);
            let v = grid.value(iu, iv);
            let _ = writeln!(s, "{},{},{},{}", w.re, w.im, v.re, v.im);
        }
    }
    s
}

pub fn charfn_sidecar(grid: &CharFnGrid, prov: &Provenance) -> String {
    let sc = CharFnSidecar {
        spec: &grid.spec_name,
        sigma: grid.sigma,
        n_primes: grid.n_primes,
        w_max: grid.w_max,
        w_nodes: grid.nodes,
        tail_bound: grid.tail_bound,
        heuristic: grid.heuristic,
        skipped_primes: &grid.skipped_primes,
        dw_normalization: "du*dv/(2*pi)",
        provenance: prov,
    };
    serde_json::to_string_pretty(&sc).expect("sidecar serialization")
}

#[derive(Serialize)]
struct DensitySidecar<'a> {
    spec: &'a str,
    sigma: f64,
    n_primes: usize,
    w_max: f64,
    w_nodes: usize,
    geometry: &'a GridGeometry,
    clip_mass: f64,
    norm_defect: f64,
    im_residue: f64,
    heuristic: bool,
    dz_normalization: &'static str,
    provenance: &'a Provenance,
}

/// CSV rows `x,y,m` at cell centers, y slowest.
pub fn density_csv(d: &DensityGrid) -> String {
    let g = &d.geom;
    let mut s = String::with_capacity(d.values.len() * 30 + 16);
    s.push_str("x,y,m\n");
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let _ = writeln!(
                s,
                "{},{},{}",
                g.node_x(ix),
                g.node_y(iy),
                d.values[g.index(ix, iy)]
            );
        }
    }
    s
}

pub fn density_sidecar(d: &DensityGrid, prov: &Provenance) -> String {
    let sc = DensitySidecar {
        spec: &d.spec_name,
        sigma: d.sigma,
        n_primes: d.n_primes,
        w_max: d.w_max,
        w_nodes: d.w_nodes,
        geometry: &d.geom,
        clip_mass: d.clip_mass,
        norm_defect: d.norm_defect,
        im_residue: d.im_residue,
        heuristic: d.heuristic,
        dz_normalization: "dx*dy/(2*pi)",
        provenance: prov,
    };
    serde_json::to_string_pretty(&sc).expect("sidecar serialization")
}

/// Gnuplot `nonuniform matrix` payload: first row is the column count
/// followed by the x coordinates; each following row is y then the densities.
pub fn density_gnuplot_matrix(d: &DensityGrid) -> String {
    let g = &d.geom;
    let mut s = String::with_capacity(d.values.len() * 24);
    let _ = write!(s, "{}", g.nx);
    for ix in 0..g.nx {
        let _ = write!(s, " {}", g.node_x(ix));
    }
    s.push('\n');
    for iy in 0..g.ny {
        let _ = write!(s, "{}", g.node_y(iy));
        for ix in 0..g.nx {
            let _ = write!(s, " {}", d.values[g.index(ix, iy)]);
        }
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct HistogramSidecar<'a> {
    spec: &'a str,
    sigma: f64,
    t_max: f64,
    samples: usize,
    prime_cutoff: u64,
    seed: u64,
    geometry: &'a GridGeometry,
    out_of_range: u64,
    heuristic: bool,
    provenance: &'a Provenance,
}

/// CSV rows `x,y,count` at cell centers, y slowest.
pub fn histogram_csv(h: &EmpiricalHistogram) -> String {
    let g = &h.geom;
    let mut s = String::with_capacity(h.counts.len() * 24 + 16);
    s.push_str("x,y,count\n");
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let _ = writeln!(
                s,
                "{},{},{}",
                g.node_x(ix),
                g.node_y(iy),
                h.counts[g.index(ix, iy)]
            );
        }
    }
    s
}

pub fn histogram_sidecar(h: &EmpiricalHistogram, prov: &Provenance) -> String {
    let sc = HistogramSidecar {
        spec: &h.spec_name,
        sigma: h.sigma,
        t_max: h.t_max,
        samples: h.sample_count,
        prime_cutoff: h.prime_cutoff,
        seed: h.seed,
        geometry: &h.geom,
        out_of_range: h.out_of_range,
        heuristic: h.heuristic,
        provenance: prov,
    };
    serde_json::to_string_pretty(&sc).expect("sidecar serialization")
}

#[derive(Serialize)]
struct CompareSidecar<'a> {
    spec: &'a str,
    sigma: f64,
    report: &'a DiscrepancyReport,
    provenance: &'a Provenance,
}

pub fn compare_report_json(
    spec: &str,
    sigma: f64,
    report: &DiscrepancyReport,
    prov: &Provenance,
) -> String {
    serde_json::to_string_pretty(&CompareSidecar {
        spec,
        sigma,
        report,
        provenance: prov,
    })
    .expect("report serialization")
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}
