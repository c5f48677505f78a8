//! Exact continued fractions, Farey neighbour predicates and the
//! infinite-loop-mod-n machinery for the p-adic Littlewood conjecture.
//!
//! Everything is computed in exact integer arithmetic; there is no
//! floating point anywhere in the crate.

pub mod contfrac;
pub mod cutting_seq;
mod error;
pub mod farey_core;
pub mod gamma_paths;
pub mod loops;
pub mod plc_verify;

pub use contfrac::surd::QuadSurd;
pub use contfrac::{CFExpansion, Tail, Value};
pub use error::Error;
pub use farey_core::{FareyEdge, Rational};
pub use loops::LoopVerdict;
