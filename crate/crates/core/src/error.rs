use thiserror::Error;

/// Errors raised while building or analysing a state.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("component states are linearly dependent: |{which}| = {magnitude} >= 1")]
    LinearDependence { which: &'static str, magnitude: f64 },
    #[error("state is not normalized: residual {residual:e} exceeds {tolerance:e}")]
    NotNormalized { residual: f64, tolerance: f64 },
    #[error("both amplitudes vanish")]
    ZeroState,
    #[error("phase of {0} is undefined because it is zero")]
    PhaseUndefined(&'static str),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("no |nu| >= 0 satisfies normalization for the given inputs")]
    NoCompatibleNu,
    #[error("Bell expectation has imaginary residue {0:e}")]
    NonHermitianDrift(f64),
    #[error("weak-decay norm is singular: |1 - eps^2| = {0:e}")]
    SingularNorm(f64),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

impl Error {
    /// Stable machine-readable name used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::LinearDependence { .. } => "LinearDependence",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::ZeroState => "ZeroState",
            Error::PhaseUndefined(_) => "PhaseUndefined",
            Error::DomainError(_) => "DomainError",
            Error::NoCompatibleNu => "NoCompatibleNu",
            Error::NonHermitianDrift(_) => "NonHermitianDrift",
            Error::SingularNorm(_) => "SingularNorm",
            Error::InvalidSweep(_) => "InvalidSweep",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
