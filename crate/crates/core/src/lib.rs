//! Unmating of expanding Thurston maps whose postcritical set lies on an
//! oriented, fully invariant (up to homotopy) curve.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! * [`complex`] parses and validates the combinatorial description of the
//!   curve `γ⁰`, its pullback `γ¹` and their rotation systems;
//! * [`spectral`] builds the edge transition matrix and certifies its
//!   positive Perron eigenvector in exact arithmetic;
//! * [`parameterize`] solves for the circle parameters of every marker;
//! * [`portraits`] runs the critical-marking procedure and certifies the two
//!   critical portraits;
//! * [`laminations`] generates finite-depth lamination approximations;
//! * [`render`] draws laminations as SVG.
//!
//! All stored quantities are exact rationals.

pub mod circle;
pub mod complex;
pub mod error;
pub mod laminations;
pub mod parameterize;
pub mod pipeline;
pub mod portraits;
pub mod render;
pub mod spectral;

pub use circle::{Angle, Leaf, OrbitSignature};
pub use complex::{Color, MapSpec, ValidationReport};
pub use error::{Error, Result};
pub use pipeline::{run_pipeline, PipelineOptions, PipelineResult};
