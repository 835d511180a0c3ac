use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("metric is singular or ill-conditioned at {point:?} (condition {condition:.3e})")]
    SingularMetric { point: Vec<f64>, condition: f64 },
    #[error("point {point:?} lies outside the chart (margin {margin:.3e})")]
    OutOfChart { point: Vec<f64>, margin: f64 },
    #[error("transport error estimate {estimate:.3e} above tolerance {tol:.3e} at {steps} steps")]
    StepUnderflow { estimate: f64, tol: f64, steps: usize },
    #[error("operation needs an orthonormal frame but the model has none")]
    MissingFrame,
    #[error("endomorphism is not symmetric for the metric (asymmetry {asymmetry:.3e})")]
    AsymmetricField { asymmetry: f64 },
    #[error("fiber tensor T is not Codazzi (residual {residual:.3e})")]
    NonCodazziT { residual: f64 },
    #[error("sampled eigenvalue {eigenvalue:.6e} of T does not exceed the bound {bound:.6e}")]
    BoundViolated { eigenvalue: f64, bound: f64 },
    #[error("endomorphism is singular or ill-conditioned (condition {condition:.3e})")]
    SingularA { condition: f64 },
    #[error("H is not Codazzi on the base (residual {residual:.3e})")]
    NonCodazziH { residual: f64 },
    #[error("time interval ({lo}, {hi}) is empty")]
    EmptyInterval { lo: f64, hi: f64 },
    #[error("cylinder base is not the warped product ds^2 + e^(-4s) g_F")]
    WrongBase,
    #[error("loop transport too far from identity (|tau - I| = {distance:.3e})")]
    LogDivergence { distance: f64 },
    #[error("loop is not closed (endpoint gap {gap:.3e})")]
    OpenLoop { gap: f64 },
    #[error("numerical rank is ambiguous (gap ratio {gap_ratio:.3e})")]
    AmbiguousRank { gap_ratio: f64 },
    #[error("Clifford representation of dimension {dim} exceeds the supported maximum 8")]
    DimTooLarge { dim: usize },
    #[error("spinor vanishes at the sample point (norm {norm:.3e})")]
    VanishingSpinor { norm: f64 },
    #[error("fiber spinor is not parallel (residual {residual:.3e})")]
    NonParallelFiber { residual: f64 },
    #[error("spinor integration is path dependent (discrepancy {discrepancy:.3e})")]
    HolonomyObstruction { discrepancy: f64 },
    #[error("spinor is not Codazzi for the given tensor (residual {residual:.3e})")]
    NotCodazzi { residual: f64 },
    #[error("constraint rank changes under grid refinement ({coarse} vs {fine})")]
    GridTooCoarse { coarse: usize, fine: usize },
    #[error("configuration error: {0}")]
    ConfigError(String),
    #[error("fixture error: {0}")]
    FixtureError(String),
    #[error("unknown identifier: {0}")]
    UnknownId(String),
}

pub type Result<T> = std::result::Result<T, Error>;
