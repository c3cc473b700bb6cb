use thiserror::Error;

/// Errors raised by signal construction, transforms, solvers and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("atom {index} is out of band: |carrier| + bandwidth = {lhs} > band_limit = {band_limit}")]
    OutOfBand {
        index: usize,
        lhs: f64,
        band_limit: f64,
    },

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("band fraction must satisfy 0 < W <= pi, got {0}")]
    InvalidBand(f64),

    #[error("transform size {n} must be even and at least the window length {len}")]
    TransformSize { n: usize, len: usize },

    #[error("oversampling required: one-sided recovery needs band fraction W = tau*Omega < pi, got {0}")]
    OversamplingRequired(f64),

    #[error("underdetermined: increase oversampling or knowns ({in_band} in-band bins, {known} known samples)")]
    Underdetermined { known: usize, in_band: usize },

    #[error("no known samples in window")]
    NoKnownSamples,

    #[error("unknown set is not interior: window endpoints must be known for gap recovery")]
    GapNotInterior,

    #[error("window contains {0} unknown samples; recover them first")]
    UnknownSamples(usize),

    #[error("window has zero energy")]
    ZeroWindow,

    #[error("aliasing demo needs 2*tau*Omega >= pi and both carriers in band: {0}")]
    AliasingBand(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
