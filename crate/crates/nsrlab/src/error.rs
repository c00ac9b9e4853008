//! Crate-wide error type.

/// Errors produced by grid construction, quadrature, spectral operators and
/// the diagnostic engines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid validation: {0}")]
    GridValidation(String),
    #[error("field validation: {0}")]
    FieldValidation(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("cylinder outside sampled time range: {0}")]
    CylinderOutOfRange(String),
    #[error("radius {r} below resolution floor {floor} (4 cells)")]
    ResolutionFloor { r: f64, floor: f64 },
    #[error("missing field: {0}")]
    MissingField(&'static str),
    #[error("exponent regime: {0}")]
    ExponentRegime(String),
    #[error("time scaling misaligned: {0}")]
    TimeMisaligned(String),
    #[error("padding violation: {0}")]
    PaddingViolation(String),
    #[error("CFL violation at step {step}: {detail}")]
    CflViolation { step: usize, detail: String },
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ladder infeasible: {0}")]
    LadderInfeasible(String),
    #[error("energy check refused: {0}")]
    EnergyRefused(String),
}

pub type Result<T> = std::result::Result<T, Error>;
