//! Multicolor Turán numbers for edge-disjoint packings: constructions,
//! rainbow checks, an exact solver and fractional weight optimization.

pub mod certificate;
pub mod construct;
pub mod error;
pub mod fractional;
pub mod gadget;
pub mod graph;
pub mod lp;
pub mod rainbow;
pub mod rational;
pub mod solver;

pub use certificate::{Verdict, Verification};
pub use error::{Error, Result};
pub use graph::{ColoredPacking, SimpleGraph};
pub use rational::Rational;
