use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid size {n}: {reason}")]
    InvalidGrid { n: usize, reason: &'static str },

    #[error("fields live on different grids (n = {left} vs n = {right})")]
    GridMismatch { left: usize, right: usize },

    #[error("spectral field is not Hermitian: |c(k) - conj c(-k)| = {defect:e} at k = {k:?}")]
    SymmetryViolation { k: [i32; 3], defect: f64 },

    #[error("Lebesgue exponent r = {0} must be >= 1")]
    InvalidExponent(f64),

    #[error("shell index {q} outside [-1, {q_max}]")]
    ShellOutOfRange { q: i32, q_max: i32 },

    #[error("grid n = {n} only resolves shells up to {q_max}; at least 2 is required")]
    PartitionTooSmall { n: usize, q_max: i32 },

    #[error("shell {0} of the field is identically zero; ratio undefined")]
    ZeroShell(i32),

    #[error("invalid parameter {name} = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("invalid forcing: {0}")]
    InvalidForcing(String),

    #[error("non-finite state detected at t = {t} (blow-up guard)")]
    BlowUp { t: f64 },

    #[error("time step {dt:e} exceeds the stability limit {limit:e} at t = {t}")]
    Unstable { dt: f64, limit: f64, t: f64 },

    #[error("decay fit needs at least {needed} samples after the transient window, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("{0}")]
    Config(#[from] crate::io::config::ConfigError),

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
