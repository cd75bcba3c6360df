use std::fmt;

use thiserror::Error;

/// Failures inside the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("non-finite evaluation {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },
    #[error("no finite evaluations on [{lo}, {hi}]")]
    NoFiniteSamples { lo: f64, hi: f64 },
    #[error("invalid interval [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },
    #[error("quadrature on [{lo}, {hi}] stalled with error estimate {estimate:e}")]
    QuadratureStalled { lo: f64, hi: f64, estimate: f64 },
    #[error("derivative order {0} is not supported (use 1 or 2)")]
    UnsupportedOrder(u8),
    #[error("tolerance `{name}` has invalid value {value}")]
    InvalidTolerance { name: &'static str, value: f64 },
}

/// The geometric hypotheses whose violation makes a computation meaningless.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Gauss curvature of the disc metric is positive.
    PositiveGaussCurvature,
    /// Boundary geodesic curvature equals one.
    UnitGeodesicCurvature,
    /// The disc is strictly mean convex in the ambient manifold.
    MeanConvexity,
    /// The meridian slope radicand is non-negative.
    EmbeddabilityRadicand,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::PositiveGaussCurvature => "K>0",
            Hypothesis::UnitGeodesicCurvature => "k_h=1",
            Hypothesis::MeanConvexity => "H>0",
            Hypothesis::EmbeddabilityRadicand => "embeddability radicand >= 0",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },
    #[error("hypothesis {hypothesis} violated: {detail}")]
    Hypothesis { hypothesis: Hypothesis, detail: String },
    #[error(
        "not embeddable (hypothesis {}): radicand {radicand:e} at node r = {node}",
        Hypothesis::EmbeddabilityRadicand
    )]
    NonEmbeddable { node: f64, radicand: f64 },
    #[error("boundary circle radius {radius} lies outside the unit ball")]
    BoundaryOutsideBall { radius: f64 },
    #[error("principal curvatures are not real: H^2/4 - K = {discriminant:e}")]
    NonReal { discriminant: f64 },
    #[error("degenerate surface: profile radius vanishes at r = {r}")]
    Degenerate { r: f64 },
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl GeometryError {
    pub fn hypothesis(hypothesis: Hypothesis, detail: impl Into<String>) -> Self {
        GeometryError::Hypothesis {
            hypothesis,
            detail: detail.into(),
        }
    }

    pub fn domain(what: &'static str, value: f64, domain: impl Into<String>) -> Self {
        GeometryError::Domain {
            what,
            value,
            domain: domain.into(),
        }
    }

    /// The violated hypothesis, when the error is a hypothesis failure.
    pub fn violated(&self) -> Option<Hypothesis> {
        match self {
            GeometryError::Hypothesis { hypothesis, .. } => Some(*hypothesis),
            GeometryError::NonEmbeddable { .. } => Some(Hypothesis::EmbeddabilityRadicand),
            _ => None,
        }
    }

    /// Oracle disagreements are internal faults rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, GeometryError::Consistency(_))
    }
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
