//! Shared error type.
//!
//! Failures split into two families that callers treat differently: violated
//! structural assumptions about the input (wrong degree, singular pole curve,
//! binomial denominator, degenerate direction), and exhausted computation
//! budgets (precision, step count, derivative order, oracle size).  The CLI
//! maps the first family to exit code 2 and the second to exit code 3.

use thiserror::Error;

/// Structural assumptions on the input F = P/Q that the algorithms require.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assumption {
    /// Q(0,0) must not vanish, otherwise F has no power-series expansion.
    DenominatorNonzeroAtOrigin,
    /// The curve Q = 0 must be smooth: no common zero of (Q, Q_x, Q_y).
    SmoothPoleCurve,
    /// Q must have at least three monomials; two-term denominators have
    /// lattice-like supports for which the direction decomposition is void.
    NotBinomial,
    /// The direction must be a pair of positive integers.
    PositiveDirection,
}

impl std::fmt::Display for Assumption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Assumption::DenominatorNonzeroAtOrigin => {
                write!(f, "denominator vanishes at the origin")
            }
            Assumption::SmoothPoleCurve => write!(f, "pole curve is singular"),
            Assumption::NotBinomial => write!(f, "denominator is a binomial"),
            Assumption::PositiveDirection => write!(f, "direction must be positive"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("assumption violated: {0}")]
    AssumptionViolated(Assumption),

    #[error("input degree {found} exceeds the supported cap {cap}")]
    DegreeCap { cap: u32, found: u32 },

    #[error("ball division by an enclosure containing zero")]
    BallDivisionByZero,

    #[error("ball operation received an enclosure outside its domain: {0}")]
    BallDomain(&'static str),

    #[error("precision escalated to {reached} bits without certifying: {context}")]
    PrecisionExhausted { reached: u32, context: String },

    #[error("polynomial system is not zero-dimensional")]
    NotZeroDimensional,

    #[error("resultant of two polynomials that are both constant in the eliminated variable")]
    DegenerateResultant,

    #[error("derivative order cap {cap} exceeded while measuring saddle degeneracy")]
    DerivativeCap { cap: u32 },

    #[error("ascent step budget {cap} exceeded")]
    StepCapExceeded { cap: u64 },

    #[error("oracle table of {requested} cells exceeds the cap {cap}")]
    OracleCap { cap: u64, requested: u64 },

    #[error("direction {r}:{s} is degenerate for this denominator: {reason}")]
    BadDirection { r: u64, s: u64, reason: String },

    #[error("numerator vanishes at a contributing saddle; the leading constant degenerates")]
    VanishingNumerator,

    #[error("analytic continuation failed: {0}")]
    Continuation(String),

    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that indicate exhausted budgets rather than bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted { .. }
                | Error::DerivativeCap { .. }
                | Error::StepCapExceeded { .. }
                | Error::OracleCap { .. }
        )
    }
}
