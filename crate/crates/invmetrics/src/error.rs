use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// The defining-function gradient vanishes where a normal is needed.
    #[error("degenerate gradient at a boundary point (norm {norm:.3e})")]
    DegenerateGradient { norm: f64 },

    /// Boundary projection (signed distance) did not converge.
    #[error("boundary projection failed to converge within {max_iter} iterations")]
    NoConvergence { max_iter: usize },

    /// A Moebius-type map was evaluated too close to its pole.
    #[error("evaluation too close to a pole (denominator {denom:.3e})")]
    PoleHit { denom: f64 },

    /// Points handed to the annulus covering map violate its preconditions.
    #[error("cannot lift point to the covering strip: {reason}")]
    LiftFailure { reason: String },

    /// No feasible analytic disc was found within the optimization budget.
    #[error("no feasible disc found within budget ({detail})")]
    Infeasible { detail: String },

    /// A disc supposed to be boundary-attached is not.
    #[error("disc is not boundary attached (residual {residual:.3e} > {threshold:.3e})")]
    NotBoundaryAttached { residual: f64, threshold: f64 },

    /// The left-inverse equation has no root in the unit disc.
    #[error("left-inverse equation has no root in the disc (winding {winding})")]
    NoRoot { winding: i64 },

    /// The left-inverse equation has several roots in the unit disc.
    #[error("left-inverse equation has multiple roots in the disc (winding {winding})")]
    MultipleRoots { winding: i64 },

    /// The boundary point does not look strongly convex numerically.
    #[error("boundary point is not strongly convex (margin {margin:.3e})")]
    NotStronglyConvexAt { margin: f64 },

    /// Family construction ran out of candidate parameters.
    #[error("parameter pool exhausted at level {level}: {detail}")]
    BudgetExhausted { level: usize, detail: String },

    /// Approach discs do not exhibit a decreasing Cauchy trend.
    #[error("no Cauchy trend in approach discs: gaps {gaps:?}")]
    NoCauchyTrend { gaps: Vec<f64> },

    /// Two coincident points where a genuine pair is required.
    #[error("degenerate pair: the two points coincide")]
    DegeneratePair,

    /// Parse error in one of the structured text formats.
    #[error("parse error: {0}")]
    Parse(String),

    /// Invalid argument or configuration value.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
