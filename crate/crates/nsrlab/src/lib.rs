//! Scale-invariant parabolic-cylinder diagnostics for sampled 3-D
//! incompressible flow fields.
//!
//! The crate evaluates localized space-time norms over backward parabolic
//! cylinders, the dimensionless functionals built from them, the interior
//! regularity criteria they feed, and the singular-integral decompositions
//! and inequality audits that support those criteria. A small generator
//! module provides exact Beltrami solutions, singular mock profiles, a
//! pseudo-spectral integrator and local energy-inequality checks for
//! exercising everything end to end.

pub mod criteria;
pub mod error;
pub mod fieldlab;
pub mod genflow;
pub mod normcore;
pub mod singops;
pub(crate) mod util;

pub use error::{Error, Result};
