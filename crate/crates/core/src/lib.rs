//! Semi-regular polygons as maximizers of area at fixed corner functional.
//!
//! A convex polygon of unit perimeter has three heat-trace invariants: its
//! area, its perimeter and the corner functional `S(P) = Σ (π² − θ²)/θ`.
//! Among convex polygons with a prescribed `S`, the area is maximized by a
//! circumscriptible polygon whose angles are all equal except possibly one
//! larger angle. This crate builds that family and checks the claim from
//! several directions:
//!
//! - [`geometry`]: polygons, interior angles, the corner functional and the
//!   circumscriptible construction.
//! - [`semiregular`]: the one-parameter family indexed by `s > 2`.
//! - [`heat`]: short-time heat-trace coefficients and an exact rectangle
//!   spectrum used to validate them.
//! - [`analysis`]: the closed-form functions of the two-angle reduction and
//!   grid certificates for each inequality they must satisfy.
//! - [`optimize`]: direct multi-start maximization over `n` angles and the
//!   two-angle grid search.
//! - [`sampler`]: random convex polygons, the `(S, area)` scatter and the
//!   non-convex "hair" construction.

pub mod analysis;
pub mod certificate;
pub mod error;
pub mod geometry;
pub mod heat;
pub mod optimize;
pub mod roots;
pub mod sampler;
pub mod semiregular;

pub use certificate::GridCertificate;
pub use error::{Error, Result};
pub use geometry::{AngleSet, Point, Polygon, SFunctionalValue};
pub use semiregular::SemiRegularSpec;

/// Tolerance for geometric identities (areas, closure of constructions).
pub const GEOMETRIC_TOL: f64 = 1e-10;
/// Tolerance for the angle-sum identity `Σθ = (n − 2)π`.
pub const ANGLE_SUM_TOL: f64 = 1e-9;
/// Convergence tolerance for optimization residuals.
pub const OPTIMIZATION_TOL: f64 = 1e-8;
