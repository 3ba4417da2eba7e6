//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An index referred to a neuron or timestep outside the raster.
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },
    /// Two containers that must agree in shape did not.
    ShapeMismatch { expected: String, found: String },
    /// A parameter failed validation.
    InvalidParam { name: &'static str, reason: String },
    /// A spike-time list was not strictly increasing.
    UnsortedSpikeTimes { neuron: usize, position: usize },
    /// A file could not be parsed. `line` is 1-based.
    Parse { path: String, line: usize, reason: String },
    /// Underlying I/O failure.
    Io { path: String, reason: String },
    /// A membrane potential left the finite range during simulation.
    NonFiniteVoltage { neuron: usize, step: usize },
    /// The random weight draw produced a matrix with zero spectral radius.
    ZeroSpectralRadius,
    /// Too few samples for a distribution fit.
    TooFewSamples { needed: usize, got: usize },
    /// A maximum-likelihood fit diverged (degenerate sample).
    FitDiverged { reason: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IndexOutOfRange { what, index, limit } => {
                write!(f, "{what} index {index} out of range (limit {limit})")
            }
            Error::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected {expected}, found {found}")
            }
            Error::InvalidParam { name, reason } => write!(f, "invalid parameter {name}: {reason}"),
            Error::UnsortedSpikeTimes { neuron, position } => write!(
                f,
                "spike times for neuron {neuron} not strictly increasing at position {position}"
            ),
            Error::Parse { path, line, reason } => {
                write!(f, "parse error in {path} at line {line}: {reason}")
            }
            Error::Io { path, reason } => write!(f, "i/o error on {path}: {reason}"),
            Error::NonFiniteVoltage { neuron, step } => {
                write!(f, "non-finite membrane potential for neuron {neuron} at step {step}")
            }
            Error::ZeroSpectralRadius => write!(f, "weight matrix has zero spectral radius"),
            Error::TooFewSamples { needed, got } => {
                write!(f, "too few samples for fit: need {needed}, got {got}")
            }
            Error::FitDiverged { reason } => write!(f, "power-law fit diverged: {reason}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io { path: path.display().to_string(), reason: err.to_string() }
    }
}
