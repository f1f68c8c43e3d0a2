//! Error types shared across the engine.

use thiserror::Error;

/// Every failure mode of the engine.
///
/// Construction errors (`NonSmoothCone`, `DanglingWall`, ...) signal bad input
/// data; regime errors (`NotFano`, `NotSemipositive`) signal a geometry outside
/// the range of validity of a closed formula; `OracleMismatch` and
/// `MeasureViolation` signal internal bugs and are never expected to fire.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("maximal cone #{cone} has ray-matrix determinant {det}, expected ±1")]
    NonSmoothCone { cone: usize, det: i64 },

    #[error("facet {facet:?} is shared by {count} maximal cones, expected exactly 2")]
    DanglingWall { facet: Vec<usize>, count: usize },

    #[error("ray #{ray} is not primitive (or zero)")]
    NonPrimitiveRay { ray: usize },

    #[error("invalid fan data: {0}")]
    InvalidFan(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("no effective class has degree <= {cap}; smallest wall degree is {min_wall_degree}")]
    CapTooSmall { cap: i64, min_wall_degree: i64 },

    #[error("degree-{degree} graded piece has dimension {dim}, expected 1")]
    DegenerateTopDegree { degree: usize, dim: usize },

    #[error("elements belong to different Chow rings")]
    RingMismatch,

    #[error("Poincare pairing matrix of the given family is singular; not a basis")]
    SingularPairing,

    #[error("cannot invert D + 0*z: the j = 0 factor is a plain class multiplication")]
    ZeroJ,

    #[error("Novikov denominator has constant term != 1")]
    NonUnitDenominator,

    #[error("X is not Fano: -K_X pairs non-positively with wall class {wall:?}")]
    NotFano { wall: Vec<i64> },

    #[error("semipositivity fails: {0}")]
    NotSemipositive(String),

    #[error("cross-oracle disagreement for beta = {beta:?}: S-function route {extracted}, closed-form route {closed_form}")]
    OracleMismatch {
        beta: Vec<i64>,
        extracted: String,
        closed_form: String,
    },

    #[error("marking {marking} carries no tangency; nothing to expand")]
    NoTangency { marking: usize },

    #[error("rewriting step did not decrease the termination measure: {from:?} -> {to:?}")]
    MeasureViolation {
        from: (i64, usize, i64),
        to: (i64, usize, i64),
    },

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, EngineError>;
