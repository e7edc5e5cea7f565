// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("white noise has no pointwise correlation value")]
    PointwiseUndefined,
    #[error("quadrature did not converge (error estimate {estimate:.3e})")]
    QuadratureNonConvergent { estimate: f64 },
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("noise spectral density is negative ({value:.3e} at omega = {omega})")]
    InadmissibleNoise { omega: f64, value: f64 },
    #[error("level index {index} out of range (system has {len} levels)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("system carries no dipole data")]
    MissingDipoleData,
    #[error("at least two levels are required, got {0}")]
    TooFewLevels(usize),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("invalid kernel parameters: {0}")]
    InvalidParams(String),
    #[error("intermediate level {level} has zero width in regularized mode")]
    ZeroWidth { level: usize },
    #[error("asymptotic kernel needs positive widths (use the naive mode for Γ = 0)")]
    ZeroWidthInRegularizedMode,
    #[error("Δ_fi + ω_k vanishes; the resonant mixed term is not evaluated")]
    ResonantMixedTerm,
    #[error("trajectory covers {available} but {requested} was requested")]
    TrajectoryTooShort { available: f64, requested: f64 },
    #[error("at k index {index} (k = {k}): {source}")]
    AtGridPoint { index: usize, k: f64, source: Box<Error> },
    #[error("{} grid points failed; first: {}", .0.len(), .0[0])]
    GridFailures(Vec<Error>),
    #[error("config error at line {line}, key `{key}`: {message}")]
    Config { line: usize, key: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
