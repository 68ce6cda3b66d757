use std::path::PathBuf;

use thiserror::Error;

/// Every failure the toolkit reports. Variant names double as the stable
/// error names surfaced by the CLI and the HTTP service.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow near pole: {0}")]
    Overflow(String),

    #[error("phase shift inconsistent: {0}")]
    PhaseShiftInconsistent(String),

    #[error("not elliptic: vertex {vertex}, {combination} vanishes mod 2pi")]
    NotElliptic { vertex: usize, combination: String },

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("t = {t} lies outside every valid interval")]
    OutOfRange { t: f64 },

    #[error("negative discriminant D({t}) = {value}")]
    NegativeDiscriminant { t: f64, value: f64 },

    #[error("propagation dead at vertex {vertex}")]
    PropagationDead { vertex: usize },

    #[error("non-real angles: {0}")]
    NonRealAngles(String),

    #[error("degenerate central quad: {0}")]
    DegenerateQuad(String),

    #[error("embedding inconsistent: {0}")]
    EmbedInconsistent(String),

    #[error("too few flexion samples: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Overflow(_) => "Overflow",
            Error::PhaseShiftInconsistent(_) => "PhaseShiftInconsistent",
            Error::NotElliptic { .. } => "NotElliptic",
            Error::InvalidSeed(_) => "InvalidSeed",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::NegativeDiscriminant { .. } => "NegativeDiscriminant",
            Error::PropagationDead { .. } => "PropagationDead",
            Error::NonRealAngles(_) => "NonRealAngles",
            Error::DegenerateQuad(_) => "DegenerateQuad",
            Error::EmbedInconsistent(_) => "EmbedInconsistent",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::Numeric(_) => "NumericFailure",
            Error::Io { .. } => "IoError",
            Error::Json { .. } => "IoError",
        }
    }

    /// True for rejections caused by the input data rather than by numerics or I/O.
    pub fn is_domain_rejection(&self) -> bool {
        !matches!(self, Error::Numeric(_) | Error::Io { .. } | Error::Json { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
