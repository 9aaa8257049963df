//! Similarity-invariant differential geometry of non-lightlike curves in
//! Minkowski 3-space.
//!
//! The p-shape `(κ̃, τ̃) = (−dκ/(κ dσ), τ/κ)` of a curve, with `σ` the
//! spherical arc length `dσ = κ ds`, is invariant under orientation
//! preserving p-similarities `r ↦ μ q r q⁻¹ + b`. This crate computes it
//! from sampled or analytic curves, rebuilds curves from a prescribed
//! p-shape, and registers curves that share one.

pub mod catalog;
pub mod cli;
pub mod curve;
pub mod error;
pub mod frenet;
pub mod io;
pub mod minkowski;
pub mod pshape;
pub mod reconstruct;
pub mod registration;
pub mod split_quaternion;
pub mod stencil;

pub use error::{Error, Result};
pub use minkowski::{CausalCharacter, MinkowskiVec};
pub use split_quaternion::{Orientation, PSimilarity, SplitQuaternion};
