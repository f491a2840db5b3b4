//! Optimal low-anisometry azimuthal maps between constant-curvature model
//! spaces, together with sharp anisometry lower bounds for general,
//! volume-preserving, conformal and quasiconformal maps.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod azimuthal;
pub mod bounds;
pub mod ellipsoid;
pub mod error;
pub mod model_space;
pub mod numerics;

pub use azimuthal::{anisometry, anisometry_of, AnisometryReport, AzimuthalMap, GridNode, GridProjection, Profile, RadialProfile};
pub use bounds::{bound, AhlforsOutcome, BoundQuery, BoundResult, MapClass};
pub use ellipsoid::{lemma_check, LemmaReport, QuadraticForm};
pub use error::{Error, Result};
pub use model_space::{ModelSpace, TaylorKind, TaylorSeries};
pub use numerics::Tolerance;
