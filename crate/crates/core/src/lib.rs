//! Certified upper bounds on graph Ramsey numbers via the plain flag algebra
//! method.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! 1. [`model`]: edge-colored blow-up graphs, admissibility and canonical keys.
//! 2. [`enumerate`]: admissible graphs, types and flags up to isomorphism.
//! 3. [`algebra`]: exact densities, flag products and the averaging operator.
//! 4. [`sdp`]: the semidefinite program, SDPA export and solver-output import.
//! 5. [`solver`]: a dense primal-dual interior-point method for small instances.
//! 6. [`certify`]: rounding to rationals, exact PSD checks and the integer bound.
//!
//! [`pipeline`] strings the stages together and produces a [`pipeline::RunReport`].

pub mod algebra;
pub mod certify;
pub mod enumerate;
pub mod error;
pub mod model;
pub mod pipeline;
pub mod rational;
pub mod sdp;
pub mod solver;

pub use error::{Error, Result};
pub use model::{CanonicalKey, ColorClasses, ColoredGraph, PlainGraph, RamseyProblem};
