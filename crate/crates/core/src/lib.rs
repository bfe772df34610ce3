//! The complex line `{1 + z₁ + z₂ = 0} ⊂ (ℂ*)²`, the phase tropical line, and
//! an explicit isotopy `Ψₜ` deforming the first onto the second, together with
//! a numeric harness that checks the construction on sampled points.
//!
//! Points live in `ℝ² × (S¹)²` as `(x, y, φ, ψ) = (ln|z₁|, ln|z₂|, arg z₁, arg z₂)`.

pub mod error;
pub mod harness;
pub mod isotopy;
pub mod line;
pub mod tags;
pub mod torus;
pub mod triangle;
pub mod tropical;

pub use error::{Error, Result};
pub use isotopy::{psi_t, psi_t_eval, region_tag, Evaluation, IsotopyParams};
pub use line::AmbientPoint;
pub use tags::{Major, RegionTag, Side, Sub, TagSet, TropPart};
pub use torus::{Angle, PlanePoint};
