use thiserror::Error;

/// Failures raised by the geometry kernel and everything built on it.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("metric matrix is degenerate at {point:?}: {detail}")]
    DegenerateMetric { point: Vec<f64>, detail: String },

    #[error("metric matrix is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },

    #[error("jet of order {required} requested but at most {available} can be provided")]
    InsufficientJetOrder { required: usize, available: usize },

    #[error("finite-difference stencil leaves the domain at {point:?}")]
    DomainBoundary { point: Vec<f64> },

    #[error("immersion is degenerate at {x:?} (det of induced metric {det:e})")]
    ImmersionDegenerate { x: Vec<f64>, det: f64 },

    #[error("hypersurface is not biharmonic here (|tau2| = {norm:e} > {tolerance:e})")]
    NotBiharmonic { norm: f64, tolerance: f64 },

    #[error("ambient metric is not theta-Einstein (fit residual {residual:e} > {tolerance:e})")]
    NotThetaEinstein { residual: f64, tolerance: f64 },

    #[error("theta-Einstein fit is rank deficient")]
    DegenerateFit,

    #[error("vector field is not torse-forming (residual {residual:e} > {tolerance:e})")]
    NotTorseForming { residual: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, GeomError>;
