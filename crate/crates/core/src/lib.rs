//! Numerical toolkit for the free-boundary isometric embedding of positively
//! curved discs into the unit ball.
//!
//! * [`conformal_disc`]: radial conformal metrics, their Gauss and boundary
//!   geodesic curvature, and the harmonic interpolation between metrics.
//! * [`embedding`]: the rotationally symmetric embedding by quadrature and its
//!   extrinsic geometry.
//! * [`schwarzschild`]: polar caps in the spatial Schwarzschild manifold.
//! * [`quasilocal`]: the free-boundary Brown-York mass and parameter scans.
//! * [`series`]: exact Catalan identities.

// `!(x > 0.0)` is used deliberately so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal_disc;
pub mod embedding;
pub mod error;
pub mod invariants;
pub mod numerics;
pub mod output;
pub mod quasilocal;
pub mod schwarzschild;
pub mod series;

pub use conformal_disc::{CurvatureReport, RadialConformalMetric, RadialProfile};
pub use embedding::{ExtrinsicData, FreeBoundaryResiduals, RevolutionEmbedding};
pub use error::{GeometryError, Hypothesis, NumericsError};
pub use numerics::{Root, Tolerances};
pub use output::Format;
pub use quasilocal::{MassReport, ScanRow};
pub use schwarzschild::{BoundaryData, SchwarzschildParams, SupportSphere};
pub use series::ExactRational;
