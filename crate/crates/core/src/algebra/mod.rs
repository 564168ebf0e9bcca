//! Exact algebra shared by the higher modules: fields, finite fields,
//! polynomials, matrices and Gröbner bases.

pub mod field;
pub mod gf;
pub mod groebner;
pub mod matrix;
pub mod upoly;

pub use field::{Field, QQ};
pub use gf::GF;
