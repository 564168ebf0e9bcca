//! Semistable plane models of hypersurfaces over discretely valued fields.
//!
//! The crate evaluates and minimizes the stability function `φ_F` on the
//! Bruhat–Tits building, certifies GIT (in)stabilities of plane-curve special
//! fibers, and runs the descent loop that produces a semistable model,
//! extending the base field by ramification where required. All arithmetic is
//! exact.

pub mod algebra;
pub mod building;
pub mod cli;
pub mod descent;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod git_stability;
pub mod lp;
pub mod rational;
pub mod residue;
pub mod search;
pub mod valued_field;

pub use error::{Error, Result};
pub use rational::{ExtRat, Rat};
pub use residue::{Res, ResidueField};
pub use valued_field::{FieldElement, ValuedField};
