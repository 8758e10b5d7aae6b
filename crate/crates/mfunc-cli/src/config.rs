//! Run configuration: optional JSON file overlaid by command-line flags
//! (flags win), resolved into one concrete struct that is hashed into every
//! sidecar.

use std::path::{Path, PathBuf};

use mfunc::{Error, Rectangle, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Which Euler product to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpecSelector {
    Zeta,
    Modular,
    SymPow(u32),
}

impl SpecSelector {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "zeta" => Ok(SpecSelector::Zeta),
            "modular" => Ok(SpecSelector::Modular),
            other => {
                if let Some(g) = other.strip_prefix("sympow:") {
                    let gamma: u32 = g.parse().map_err(|_| {
                        Error::Parse(format!("bad symmetric power degree in spec '{other}'"))
                    })?;
                    if gamma < 2 {
                        return Err(Error::Domain(
                            "sympow needs gamma >= 2 (gamma = 1 is 'modular')".into(),
                        ));
                    }
                    Ok(SpecSelector::SymPow(gamma))
                } else {
                    Err(Error::Parse(format!(
                        "unknown spec '{other}' (expected zeta | modular | sympow:G)"
                    )))
                }
            }
        }
    }

}

/// Optional JSON config file; every field can also come from a flag.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub spec: Option<String>,
    pub sigma: Option<f64>,
    pub charfun_primes: Option<usize>,
    pub w_max: Option<f64>,
    pub w_nodes: Option<usize>,
    pub z_nodes: Option<usize>,
    pub z_rect: Option<[f64; 4]>,
    pub t_max: Option<f64>,
    pub samples: Option<usize>,
    pub cutoff: Option<u64>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub prime_limit: Option<u64>,
    pub threads: Option<usize>,
    pub tol_sup: Option<f64>,
    pub tol_l1: Option<f64>,
    pub tail_tol: Option<f64>,
    pub r1_threshold: Option<f64>,
    pub form_file: Option<PathBuf>,
    pub form_id: Option<String>,
    pub weight: Option<u32>,
    pub level: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))
    }
}

/// Fully resolved configuration; serialized verbatim into sidecars and hashed
/// for provenance.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub spec: SpecSelector,
    pub sigma: f64,
    pub charfun_primes: usize,
    pub w_max: f64,
    pub w_nodes: usize,
    pub z_nodes: usize,
    pub z_rect: Option<[f64; 4]>,
    pub t_max: f64,
    pub samples: usize,
    pub cutoff: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub prime_limit: Option<u64>,
    pub tol_sup: f64,
    pub tol_l1: f64,
    pub tail_tol: Option<f64>,
    pub r1_threshold: f64,
    pub form_file: Option<PathBuf>,
    pub form_id: String,
    pub weight: u32,
    pub level: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::Domain(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.charfun_primes == 0 || self.samples == 0 || self.cutoff < 2 {
            return Err(Error::Domain("counts must be positive".into()));
        }
        if let SpecSelector::SymPow(g) = self.spec {
            if g < 2 {
                return Err(Error::Domain("sympow needs gamma >= 2".into()));
            }
        }
        Ok(())
    }

    pub fn z_rectangle(&self) -> Result<Option<Rectangle>> {
        match self.z_rect {
            None => Ok(None),
            Some([x0, x1, y0, y1]) => Ok(Some(Rectangle::new(x0, x1, y0, y1)?)),
        }
    }

    /// Hex-truncated SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialization");
        let digest = Sha256::digest(json.as_bytes());
        digest
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect::<String>()
    }
}

/// Resolution order: flag, then config file, then default.
pub fn resolve<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
