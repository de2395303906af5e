//! Angle and range Cramér-Rao bounds for bi-static near-field localization
//! with widely-spaced multi-subarray (WSMS) transmit arrays.
//!
//! Three CRB routes are provided and cross-check each other:
//! exact manifold derivatives ([`fisher::schur_crb`]), closed forms built
//! from sum formulas ([`analytic`]), and a finite-difference 4x4 Fisher
//! oracle ([`fisher::full_fisher_oracle`]).

pub mod analytic;
pub mod closed_form;
pub mod error;
pub mod fisher;
pub mod geometry;
pub mod layout;
pub mod steering;

pub use error::{Error, Result};
pub use fisher::{CrbResult, Link, NormalizedFisher};
pub use geometry::SceneGeometry;
pub use layout::{ArrayLayout, LayoutKind};
pub use steering::Wavefront;
