use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid of size {grid} cannot hold a series of support width {width}")]
    Aliasing { grid: usize, width: usize },
    #[error("grid size {0} is not a power of two")]
    GridSize(usize),
    #[error("bound state {0} lies on or outside the unit circle")]
    BoundStateOnBoundary(Complex64),
    #[error("bound state at the origin")]
    DegenerateBoundState,
    #[error("impulse with |mu| = {0} is at or beyond a half turn")]
    FlipAngleOverflow(f64),
    #[error("zeros {0} and {1} are not simple")]
    NonSimpleZero(Complex64, Complex64),
    #[error("profile reaches the south pole (Mz = {0})")]
    FullInversionUnrepresentable(f64),
    #[error("derivative of a at bound state {0} is too small")]
    IllConditionedBoundState(Complex64),
    #[error("Remez exchange did not converge after {iterations} iterations")]
    RemezDiverged { iterations: usize, last_error: f64 },
    #[error("half pulse needs |Mx| < 1, got {0}")]
    InfeasibleHalfPulse(f64),
    #[error("bound-state kernel term overflows at index {0}")]
    BoundStateRangeOverflow(i64),
    #[error("DIST recursion broke down at step {0}")]
    DistBreakdown(i64),
    #[error("left and right gamma_0 differ by {gap} after enlarging truncation")]
    TruncationInsufficient { gap: f64 },
    #[error("finite-rephasing recursion broke down at step {0}")]
    FrtBreakdown(i64),
    #[error("pair deviates from unitarity by {0}")]
    NotUnitary(f64),
    #[error("|B| reaches 1 on the circle (max {0})")]
    FactorizationSingular(f64),
    #[error("energy {0} is not in the upper half plane")]
    EnergyNotInUpperHalfPlane(Complex64),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Aliasing { .. } => "Aliasing",
            Error::GridSize(_) => "GridSize",
            Error::BoundStateOnBoundary(_) => "BoundStateOnBoundary",
            Error::DegenerateBoundState => "DegenerateBoundState",
            Error::FlipAngleOverflow(_) => "FlipAngleOverflow",
            Error::NonSimpleZero(..) => "NonSimpleZero",
            Error::FullInversionUnrepresentable(_) => "FullInversionUnrepresentable",
            Error::IllConditionedBoundState(_) => "IllConditionedBoundState",
            Error::RemezDiverged { .. } => "RemezDiverged",
            Error::InfeasibleHalfPulse(_) => "InfeasibleHalfPulse",
            Error::BoundStateRangeOverflow(_) => "BoundStateRangeOverflow",
            Error::DistBreakdown(_) => "DistBreakdown",
            Error::TruncationInsufficient { .. } => "TruncationInsufficient",
            Error::FrtBreakdown(_) => "FrtBreakdown",
            Error::NotUnitary(_) => "NotUnitary",
            Error::FactorizationSingular(_) => "FactorizationSingular",
            Error::EnergyNotInUpperHalfPlane(_) => "EnergyNotInUpperHalfPlane",
            Error::Invalid(_) => "Invalid",
        }
    }
}
