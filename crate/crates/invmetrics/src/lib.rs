//! Invariant functions and metrics of bounded domains in `C^n`.
//!
//! The library computes certified one-sided bounds and exact closed forms for
//! the classical holomorphically invariant objects of several complex
//! variables: the Lempert function, the Kobayashi distance and
//! Kobayashi-Royden metric, the Caratheodory distance and the
//! Caratheodory-Reiffen metric. Infima (Lempert, Kobayashi) are bounded from
//! above by feasible analytic discs; suprema (Caratheodory) are bounded from
//! below by holomorphic functionals mapped into the unit disc. Equality is
//! certified only when the two-sided bracket closes.
//!
//! On top of the bounds the crate provides
//! * exact hyperbolic geometry of the disc, the ball and the annulus
//!   ([`hyperbolic`]),
//! * stationary-mapping certificates, dual maps and left inverses for
//!   complex geodesics ([`geodesics`]),
//! * the boundary scaling construction that squeezes a smooth domain onto
//!   the ball together with blended domain families and
//!   Lempert-Burns-Krantz boundary discs ([`scaling`]),
//! * an experiment harness with CSV/SVG reporting ([`harness`]).

pub mod discs;
pub mod domains;
pub mod error;
pub mod geodesics;
pub mod harness;
pub mod hyperbolic;
pub mod linalg;
pub mod metrics;
pub mod scaling;
pub mod sympoly;

pub use error::Error;

/// Library-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
