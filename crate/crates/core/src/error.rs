use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix size {n} exceeds the limit {limit} for {method}")]
    TooLarge { n: usize, limit: usize, method: &'static str },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("mode index {mode} outside 1..={n_modes}")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("invalid circuit element: {0}")]
    InvalidElement(String),

    #[error("network anchor check failed: {0}")]
    FitFailure(String),

    #[error("invalid wavepacket: {0}")]
    InvalidWavepacket(String),

    #[error("invalid detection configuration: {0}")]
    InvalidDetection(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sampler: {0}")]
    Sampler(String),

    #[error("rejection sampling acceptance too low for ports {ports:?}: {accepted} of {proposals} proposals accepted")]
    LowAcceptance { ports: Vec<usize>, accepted: u64, proposals: u64 },

    #[error("invalid protocol configuration: {0}")]
    InvalidProtocol(String),

    #[error("analysis: {0}")]
    Analysis(String),

    #[error("no beat peak above the spectral noise floor ({axis} axis): peak {peak:.3e}, floor {floor:.3e}")]
    NoBeatPeak { axis: &'static str, peak: f64, floor: f64 },

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error("config hash mismatch: {a} vs {b} (use --force to override)")]
    HashMismatch { a: String, b: String },

    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl Error {
    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "not_square",
            Error::TooLarge { .. } => "too_large",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::InvalidMatrix(_) => "invalid_matrix",
            Error::ModeOutOfRange { .. } => "mode_out_of_range",
            Error::InvalidElement(_) => "invalid_element",
            Error::FitFailure(_) => "fit_failure",
            Error::InvalidWavepacket(_) => "invalid_wavepacket",
            Error::InvalidDetection(_) => "invalid_detection",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::Sampler(_) => "sampler",
            Error::LowAcceptance { .. } => "low_acceptance",
            Error::InvalidProtocol(_) => "invalid_protocol",
            Error::Analysis(_) => "analysis",
            Error::NoBeatPeak { .. } => "no_beat_peak",
            Error::Parse { .. } => "parse",
            Error::Config(_) => "config",
            Error::HashMismatch { .. } => "hash_mismatch",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
