use thiserror::Error;

/// Everything that can go wrong inside the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid structural parameters: {0}")]
    InvalidParams(String),

    #[error("critical regime m = gamma + 1: the growth exponent is undefined")]
    CriticalRegime,

    #[error("invalid Thiele modulus: {0}")]
    InvalidThiele(String),

    #[error("tug-of-war weights need p >= 2, got p = {0}")]
    UnsupportedGameRange(f64),

    #[error("gradient vanishes; the normalized operator has no direction")]
    VanishingGradient,

    #[error("matrix is not symmetric")]
    NonSymmetric,

    #[error("finite-difference stencil at node {0} leaves the grid")]
    StencilOutOfDomain(usize),

    #[error("jet requested on the core sphere where the profile is not twice differentiable")]
    NonSmoothPoint,

    #[error("sample point lies outside the barrier annulus")]
    OutsideAnnulus,

    #[error("hypothesis violated: {0}")]
    NotApplicable(String),

    #[error("boundary data must be non-negative (found {0})")]
    NegativeBoundaryData(f64),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("rescaled sample point leaves the original domain")]
    RescaleOutOfDomain,

    #[error("insufficient signal: {0}")]
    InsufficientSignal(String),

    #[error("the positivity set has no free boundary")]
    NoFreeBoundary,

    #[error("domain too coarse: no positive node is 4h away from the free boundary")]
    DomainTooCoarse,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
