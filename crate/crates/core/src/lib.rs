//! High-precision numerics for the resurgent structure of torus-knot
//! quantum invariants: periodic characters, exact Bernoulli/L-value
//! coefficients, Borel transforms, lateral and median resummation, false
//! theta functions and their radial limits, and Habiro-ring q-series.

pub mod error;
pub mod borel;
pub mod dirichlet;
pub mod exact;
pub mod extrapolate;
pub mod habiro;
pub mod num;
pub mod periodic;
pub mod qseries;
pub mod quad;
pub mod resum;
pub mod special;

pub use error::{Error, Result};
pub use num::{Approx, Cx, PrecisionContext};
