use alloc::string::String;

use crate::expr::ParseError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown canonical profile `{0}` (expected sinusoidal, triangular, square or ramp_jump)")]
    UnknownProfile(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("refractive index must be positive, found {value} at x = {x}")]
    NonPositiveIndex { x: f64, value: f64 },

    #[error("invalid layer stack: {0}")]
    InvalidLayers(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("local wavenumber vanishes near x = {x} (cutoff singularity)")]
    Cutoff { x: f64 },

    #[error("quadrature did not converge on [{a}, {b}]; worst entry error estimate {worst:e}")]
    Quadrature { a: f64, b: f64, worst: f64 },

    #[error("matrix is not traceless (|tr| = {trace:e})")]
    NotTraceless { trace: f64 },

    #[error("profile is not even-symmetric")]
    NotSymmetric,

    #[error("profile has an index discontinuity at x = {x}; use jump matrices for this interval")]
    Discontinuity { x: f64 },

    #[error("local wavenumber is complex (n_eff = {n_eff} ≥ min n = {n_min}); use the general pathway")]
    ComplexWavenumber { n_eff: f64, n_min: f64 },

    #[error("wavenumber is not strictly monotonic on the half period")]
    NotMonotonic,

    #[error("dispersion value is not a number")]
    NotANumber,

    #[error("dispersion carries an imaginary residual of {residual:e}")]
    ComplexDispersion { residual: f64 },

    #[error("monodromy integration unstable: det W = {det}, expected {expected}")]
    Unstable { det: f64, expected: f64 },

    #[error("staircase sequence does not converge monotonically: {values:?}")]
    NonMonotoneConvergence { values: [f64; 3] },

    #[error("oracle not applicable: {0}")]
    OracleUnavailable(String),

    #[error("{failed} of {total} scan samples failed; first failure: {first}")]
    ScanFailed { failed: usize, total: usize, first: String },
}

impl Error {
    /// Errors caused by the request itself rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::UnknownProfile(_)
                | Error::Parse(_)
                | Error::NonPositiveIndex { .. }
                | Error::InvalidLayers(_)
                | Error::InvalidConfig(_)
                | Error::NotSymmetric
                | Error::ComplexWavenumber { .. }
                | Error::NotMonotonic
                | Error::Discontinuity { .. }
        )
    }
}
