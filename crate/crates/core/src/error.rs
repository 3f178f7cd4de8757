use thiserror::Error;

/// Errors raised by constructors, evaluators and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates a constructor precondition.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The point lies outside the region where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation point too close to a Borel-plane singularity.
    #[error("point {point} lies within {guard:e} of the singularity at {singularity}")]
    SingularProximity {
        point: String,
        singularity: String,
        guard: f64,
    },

    /// The point sits on a branch cut and no side was given.
    #[error("branch ambiguity: {0}; pass an explicit side")]
    BranchAmbiguity(String),

    /// Two computations that must agree did not.
    #[error("consistency failure: {0}")]
    Consistency(String),

    /// The radial limit does not exist (twisted coefficients have nonzero mean).
    #[error("radial limit does not exist: {0}")]
    NoRadialLimit(String),

    /// A numerical budget was exhausted before the tolerance was reached.
    #[error("budget exhausted: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
