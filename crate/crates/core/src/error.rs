use thiserror::Error;

/// Errors produced by the correlation and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {name} = {value} violates {constraint}")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("unphysical covariance matrix: smaller symplectic eigenvalue {nu_minus} < 1")]
    Unphysical { nu_minus: f64 },

    #[error("numeric degeneracy in symplectic spectrum: discriminant {discriminant} < 0 beyond tolerance")]
    NumericDegeneracy { discriminant: f64 },

    #[error("inconsistent state: mode 2 is pure (b = 1) but the cross covariances are nonzero")]
    InconsistentState,

    #[error("insufficient data: need {need}, got {got}")]
    InsufficientData { need: &'static str, got: usize },

    #[error("degenerate variance: imaging function is constant across frames")]
    DegenerateVariance,

    #[error("mask must contain at least one transmitting and one opaque pixel")]
    InvalidMask,

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
