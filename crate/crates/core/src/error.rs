//! Error type shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

/// All failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed header: {detail}")]
    MalformedHeader {
        path: PathBuf,
        line: usize,
        detail: String,
    },

    #[error("{path}: cell count mismatch: expected {expected}, found {actual}")]
    CountMismatch {
        path: PathBuf,
        expected: usize,
        actual: usize,
    },

    #[error("{path}:{line}: invalid value: {detail}")]
    BadValue {
        path: PathBuf,
        line: usize,
        detail: String,
    },

    #[error("nodata sentinel {sentinel} collides with a stored value at site {site}")]
    SentinelCollision { sentinel: f64, site: usize },

    #[error("degenerate value range: all samples equal {value}")]
    DegenerateRange { value: f64 },

    #[error("grid has no sample sites")]
    NoSamples,

    #[error("no nearest-neighbor sample pairs: sample energy is undefined")]
    NoSampleBonds,

    #[error("site index {site} out of range for {width}x{height} grid")]
    SiteOutOfRange {
        site: usize,
        width: usize,
        height: usize,
    },

    #[error("negative or non-finite temperature {value} at site {site}")]
    InvalidTemperature { site: usize, value: f64 },

    #[error("{count} prediction sites have no samples within the search radius (first: {first})")]
    EmptyDisc { count: usize, first: usize },

    #[error("no prediction at held-out site {site}")]
    MissingPrediction { site: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable machine-parseable class for CLI exit reporting.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => {
                "IO_NOT_FOUND"
            }
            Error::Io { .. } => "IO_ERROR",
            Error::MalformedHeader { .. } => "MALFORMED_HEADER",
            Error::CountMismatch { .. } => "COUNT_MISMATCH",
            Error::BadValue { .. } => "BAD_VALUE",
            Error::SentinelCollision { .. } => "SENTINEL_COLLISION",
            Error::DegenerateRange { .. } => "DEGENERATE_RANGE",
            Error::NoSamples => "NO_SAMPLES",
            Error::NoSampleBonds => "NO_SAMPLE_BONDS",
            Error::SiteOutOfRange { .. } => "SITE_OUT_OF_RANGE",
            Error::InvalidTemperature { .. } => "INVALID_TEMPERATURE",
            Error::EmptyDisc { .. } => "EMPTY_DISC",
            Error::MissingPrediction { .. } => "MISSING_PREDICTION",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
