use thiserror::Error;

/// Error type shared by the whole crate.
///
/// Variants are grouped by how the command-line front end maps them to exit
/// codes: configuration/validation problems (2), accuracy or quality failures
/// (3), and resource exhaustion (4).
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty domain: {0}")]
    EmptyDomain(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("incomplete data: {0}")]
    IncompleteData(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("rectangle not covered by grid: uncovered fraction {uncovered:.4e}")]
    Coverage { uncovered: f64 },

    #[error("accuracy target not met in {context}: achieved {achieved:.3e}, requested {requested:.3e}")]
    Accuracy {
        context: String,
        achieved: f64,
        requested: f64,
    },
    #[error("prime cutoff too small: tail bound {tail_bound:.3e} > tolerance {tolerance:.3e}; {suggestion}")]
    CutoffTooSmall {
        tail_bound: f64,
        tolerance: f64,
        suggestion: String,
    },
    #[error("inversion quality: {0}")]
    InversionQuality(String),
    #[error("grid too small: out-of-range fraction {fraction:.4} exceeds {limit:.4}")]
    GridTooSmall { fraction: f64, limit: f64 },
    #[error("internal consistency: {0}")]
    InternalConsistency(String),
    #[error("data corruption: {0}")]
    DataCorruption(String),
    #[error("branch condition violated: {0}")]
    Singularity(String),
    #[error("quality gate failed: {0}")]
    Quality(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code for the CLI: 2 validation, 3 accuracy/quality, 4 resource, 1 io.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EmptyDomain(_)
            | Error::Domain(_)
            | Error::IncompleteData(_)
            | Error::Parse(_)
            | Error::Coverage { .. } => 2,
            Error::Accuracy { .. }
            | Error::CutoffTooSmall { .. }
            | Error::InversionQuality(_)
            | Error::GridTooSmall { .. }
            | Error::InternalConsistency(_)
            | Error::DataCorruption(_)
            | Error::Singularity(_)
            | Error::Quality(_) => 3,
            Error::Resource(_) => 4,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
