use thiserror::Error;

/// Errors raised by the operator algebra, beam quadratures and expansions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mass must be non-negative, got {0}")]
    NegativeMass(f64),
    #[error("zero energy: massless particle at rest has no Hamiltonian inverse")]
    ZeroEnergy,
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("polarization spinor is not normalized (w†w = {0})")]
    NotNormalized(f64),
    #[error("velocity must satisfy |v| < 1, got |v| = {0}")]
    Superluminal(f64),
    #[error("operation requires a massive particle (rest frame)")]
    Massless,
    #[error("representation mismatch: {0}")]
    Representation(String),
    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("{label} failed its {property} check (deviation {deviation:e})")]
    PropertyViolated {
        label: String,
        property: &'static str,
        deviation: f64,
    },
    #[error("invalid beam parameters: {0}")]
    InvalidBeam(String),
    #[error("operator {0} requires annulus profile")]
    RequiresAnnulus(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
