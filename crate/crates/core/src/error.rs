use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("step must be positive and finite, got {0}")]
    NonPositiveStep(f64),

    #[error("non-finite {what} at s1 = {at}")]
    NonFinite { what: &'static str, at: f64 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("array length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("alpha must be non-negative, got {0}")]
    NegativeAlpha(f64),

    #[error("curvature must be non-negative, got {0}")]
    NegativeCurvature(f64),

    #[error("singular denominator (1+sigma)(1+a) with a = {a}, sigma = {sigma}")]
    SingularDenominator { a: f64, sigma: f64 },

    #[error("material case phi = {phi} is singular for sigma = {sigma}")]
    SingularCase { phi: f64, sigma: f64 },

    #[error("phi = {0} is not a multiple of pi/2")]
    PhiNotQuarterTurn(f64),

    #[error("tension C2 = {c2} must exceed tau0^2 = {tau0_sq} for a real sech curvature")]
    RealityViolated { c2: f64, tau0_sq: f64 },

    #[error("initial frame is not right-handed orthonormal (defect {defect:e})")]
    InvalidFrame { defect: f64 },

    #[error("carrier velocity is undefined for v = 0")]
    UndefinedCarrier,

    #[error("grid size {0} must be a power of two and at least 16")]
    InvalidGridSize(usize),

    #[error("grid interval [{min}, {max}] is empty or non-finite")]
    InvalidGridInterval { min: f64, max: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field has zero norm")]
    ZeroNorm,

    #[error("field leaks through the boundary: edge amplitude ratio {ratio:e}")]
    BoundaryLeak { ratio: f64 },

    #[error("time series needs at least two distinct times")]
    DegenerateTimeSpan,

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveStep(_) => "non_positive_step",
            Error::NonFinite { .. } => "non_finite",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NegativeAlpha(_) => "negative_alpha",
            Error::NegativeCurvature(_) => "negative_curvature",
            Error::SingularDenominator { .. } => "singular_denominator",
            Error::SingularCase { .. } => "singular_case",
            Error::PhiNotQuarterTurn(_) => "phi_not_quarter_turn",
            Error::RealityViolated { .. } => "reality_violated",
            Error::InvalidFrame { .. } => "invalid_frame",
            Error::UndefinedCarrier => "undefined_carrier",
            Error::InvalidGridSize(_) => "invalid_grid_size",
            Error::InvalidGridInterval { .. } => "invalid_grid_interval",
            Error::GridMismatch => "grid_mismatch",
            Error::ZeroNorm => "zero_norm",
            Error::BoundaryLeak { .. } => "boundary_leak",
            Error::DegenerateTimeSpan => "degenerate_time_span",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }
}
