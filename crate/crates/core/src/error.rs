use alloc::boxed::Box;
use alloc::string::String;

use crate::fim::WaveformSpec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A target sits exactly on a radiating or receiving element.
    #[error("target {target} coincides with an antenna or slot (zero distance)")]
    Singularity { target: usize },

    /// The Fisher information is singular or too ill-conditioned to invert.
    #[error(
        "scene is not identifiable: min eigenvalue {min_eigenvalue:e}, condition number {condition:e}"
    )]
    UnidentifiableScene { min_eigenvalue: f64, condition: f64 },

    #[error("optimization failed: {0}")]
    OptimizationFailed(String),

    /// The waveform solver ran out of iterations; `best` is the best
    /// feasible covariance seen.
    #[error("waveform solver did not converge within {iterations} iterations")]
    NotConverged {
        iterations: usize,
        best: Box<WaveformSpec>,
    },
}
