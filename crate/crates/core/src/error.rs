use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("diffusion time must be positive and finite, got {0}")]
    InvalidDiffusionTime(f64),
    #[error("truncation tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
    #[error("invalid prior: {0}")]
    InvalidPrior(&'static str),
    #[error("prior density is negative ({value:e}) at phase {phase}")]
    NegativeDensity { phase: f64, value: f64 },
    #[error("invalid probe state: {0}")]
    InvalidState(&'static str),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(&'static str),
    #[error("measurement basis is not orthonormal (Gram defect {0:e})")]
    NonOrthonormalBasis(f64),
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(&'static str),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("photon number must be at least 1")]
    ZeroPhotonNumber,
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("quadrature grid of {points} points under-resolves integrand (need {required})")]
    UnderResolvedGrid { points: usize, required: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
