//! Crate-wide error type.
//!
//! Degenerate inputs (NaN/Inf) are rejected eagerly with a distinct variant
//! rather than propagated through the arithmetic.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An input contained NaN or an infinity.
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    /// A matrix that must be invertible is singular (or numerically so).
    #[error("singular input: {0}")]
    SingularInput(&'static str),

    /// The principal logarithm is undefined: an eigenvalue lies on the
    /// closed negative real axis. Callers must use a subgroup-specific
    /// fallback instead of the generic chart.
    #[error("principal-log branch cut: {0}")]
    BranchCut(&'static str),

    /// A unit-norm or group-membership residual exceeded its tolerance.
    #[error("norm violation: {0} (residual {1:.3e})")]
    NormViolation(&'static str, f64),

    /// The third homogeneous coordinate of a projective image vanished.
    #[error("boundary degeneracy: |third coordinate| = {0:.3e}")]
    BoundaryDegeneracy(f64),

    /// An argument left the chart or parameter domain of the operation.
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// Radial derivative requested at (or too close to) the cone point.
    #[error("cone point: radial distance {0:.3e} below threshold")]
    ConePoint(f64),

    /// Order/subdivision escalation was exhausted before the tolerance.
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(&'static str),

    /// Measured kernel support exceeded the Paley-Wiener prediction.
    #[error("support overflow: measured {measured:.4}, predicted {predicted:.4}")]
    SupportOverflow { measured: f64, predicted: f64 },

    /// A work cap (enumeration size, sample count, pair count) was hit.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// Both Hecke eigenvalues were below 1/2, which is inconsistent input.
    #[error("invalid eigenvalue pair: |a| = {0:.4}, |b| = {1:.4} are both < 1/2")]
    EigenvaluePairInvalid(f64, f64),

    /// Decay fit input was malformed (too few points, non-positive values).
    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::DomainViolation(msg.into())
    }
}
