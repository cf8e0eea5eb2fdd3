use thiserror::Error;

use crate::qubit::Axis;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value {0}")]
    NonFinite(f64),

    #[error("unsupported operator dimension {0} (only 2 and 4 are supported)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("state vector is not normalized (squared norm {norm_squared})")]
    NotNormalized { norm_squared: f64 },

    #[error("invalid sign {0}: expected +1 or -1")]
    InvalidSign(i64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("{name} = {value} is outside its allowed range")]
    InvalidVisibility { name: &'static str, value: f64 },

    #[error("POVM is not positive: vx^2 + vy^2 + vz^2 = {norm_squared} > 1")]
    PositivityViolation { norm_squared: f64 },

    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("axis {0} is not a target observable of the joint measurement")]
    AxisNotAllowed(Axis),

    #[error("counts were recorded with {found} input, expected {expected}")]
    AxisMismatch { expected: Axis, found: Axis },

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("counts are empty")]
    EmptyCounts,

    #[error("singular inversion: {parameter} = {value:e} is too close to zero")]
    Singular { parameter: &'static str, value: f64 },

    #[error("inconsistent model: {0}")]
    Inconsistent(String),
}
