use thiserror::Error;

/// Errors produced by the library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("point outside the chart atlas: {0}")]
    ChartOutOfRange(String),

    #[error("metric is not positive definite at rho={rho}, min eigenvalue {min_eig}")]
    NonPositiveDefinite { rho: f64, min_eig: f64 },

    #[error("input vectors are not orthonormal (defect {0:e})")]
    NonOrthonormal(f64),

    #[error("degenerate plane: vectors are linearly dependent")]
    DegeneratePlane,

    #[error("step size underflow at t={t}, |h|={h:e}")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("constraint drift {drift:e} exceeded budget at t={t}")]
    ConstraintBlowUp { t: f64, drift: f64 },

    #[error("chart transition failed: {0}")]
    ChartTransition(String),

    #[error("geodesic is trapped (guards tripped); operation requires arrival at the boundary")]
    TrappedGeodesic,

    #[error("decay hypothesis violated: {0}")]
    DecayHypothesis(String),

    #[error("extrapolation did not converge: {0}")]
    ExtrapolationDiverged(String),

    #[error("metric jets do not match to the required order: {0}")]
    JetMismatch(String),

    #[error("not enough samples for the requested fit: need {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("invalid model parameter: {0}")]
    InvalidModel(String),

    #[error("quadrature failed to reach tolerance: estimated error {0:e}")]
    QuadratureFailure(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
