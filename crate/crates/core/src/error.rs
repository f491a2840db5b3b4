use thiserror::Error;

/// Errors raised by the geometry, map and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid tolerance: rel={rel}, abs={abs}, max_iter={max_iter}")]
    InvalidTolerance { rel: f64, abs: f64, max_iter: usize },

    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("radius {t} beyond conjugate radius {limit}")]
    BeyondConjugateRadius { t: f64, limit: f64 },

    #[error("volume {v} exceeds total volume {max} of the model space")]
    VolumeOutOfRange { v: f64, max: f64 },

    #[error("volume {v} lies past the hemisphere volume {hemisphere}, where the isoperimetric profile decreases")]
    HemisphereExceeded { v: f64, hemisphere: f64 },

    #[error("root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("anisometry infinite: the map leaves the target chart at radius {radius}")]
    Blowup { radius: f64 },

    #[error("quadratic form is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("the hyperplane normal is zero")]
    ZeroNormal,

    #[error("form distortion {ratio} exceeds Q = {q}")]
    DistortionExceeded { ratio: f64, q: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
