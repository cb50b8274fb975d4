//! Cartan projections of matrix groups over ℝ, ℂ, ℚ_p and ℚ(√r), with the
//! proximal, transverse and deformation machinery built on top of them.

pub mod bending;
pub mod error;
pub mod fields;
pub mod linalg;
pub mod cartan;
pub mod catalog;
pub mod par;
pub mod projective;
pub mod samples;
pub mod stability;
pub mod transverse;
pub mod wordgroups;

pub use error::{Error, Result};
