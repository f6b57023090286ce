use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian: max|A - A^H| = {defect:e} exceeds 1e-14 * {scale:e}")]
    NotHermitian { defect: f64, scale: f64 },

    #[error("matrix is not positive definite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sector undefined: the field strength must be positive")]
    SectorUndefined,

    #[error("supercritical field: radicand {radicand:e} <= 0 at n = {n}, s_z = {s_z}")]
    Supercritical { n: u32, s_z: i32, radicand: f64 },

    #[error("supercritical field: |b| = {b} is outside the admissible range |b| <= 1 - 1e-9")]
    SupercriticalB { b: f64 },

    #[error("operation requires g = 2 exactly, got g = {0}")]
    RequiresNormalMoment(f64),

    #[error("operation requires pz = 0, got pz = {0}")]
    RequiresZeroPz(f64),

    #[error("neutral particle: the charge must be nonzero")]
    NeutralParticle,

    #[error("state is not normalized: |psi|^2 = {0}")]
    Unnormalized(f64),

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("series spans {span:e} but at least {required:e} (four beat periods) is needed")]
    InsufficientSpan { span: f64, required: f64 },

    #[error("frequency fit failed: {0}")]
    FitFailed(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unsupported field for this check: {0}")]
    UnsupportedField(String),

    #[error("iterative solver did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
