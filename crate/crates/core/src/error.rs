use std::path::PathBuf;

use thiserror::Error;

use crate::linalg::LinalgError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("singular response matrix at h = {h_koe} kOe, f = {omega_ghz} GHz")]
    SingularAt { h_koe: f64, omega_ghz: f64 },

    #[error("eigensolver failed at h = {h_koe} kOe: {source}")]
    EigenAt {
        h_koe: f64,
        #[source]
        source: LinalgError,
    },

    #[error("system does not relax to a steady state: {0}")]
    NonDecaying(String),

    #[error("no crossing between {tunable} and {fixed} inside the field sweep")]
    NoSolution { tunable: String, fixed: String },

    #[error("zone window holds {points} field points, at least {required} needed")]
    WindowTooNarrow { points: usize, required: usize },

    #[error("order parameter does not straddle {threshold} GHz: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    NoBracket {
        g_lo: f64,
        g_hi: f64,
        threshold: f64,
    },

    #[error("regime map cell ({v1}, {v2}): {source}")]
    AtCell {
        v1: f64,
        v2: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("duplicate mode name {0:?}")]
    DuplicateMode(String),

    #[error("coupling references unknown mode {0:?}")]
    UnknownModeInCoupling(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
