//! Exact-arithmetic models of codifferential categories.
//!
//! The crate provides three executable models — the exterior algebra over
//! GF(2), the symmetric algebra over the rationals, and the degree-bounded
//! multiset modality on finite relations — together with a small morphism
//! term language, axiom suites that check every (co)differential and traced
//! monoidal law by exact equality, and an obstruction engine that mechanizes
//! the trace argument forcing characteristic-zero finite-dimensional models
//! to be trivial.
//!
//! No floating point appears anywhere: scalars are GF(2) bits, arbitrary
//! precision rationals, or booleans, and every verdict is an exact equality.

pub mod dsl;
pub mod error;
pub mod finrel;
pub mod fvec;
pub mod gf2ext;
pub mod matrix;
pub mod model;
pub mod multiset;
pub mod polysym;
pub mod scalar;
pub mod theorem;

pub use error::Error;
pub use matrix::{swap_matrix, ExactMatrix};
pub use scalar::{Characteristic, Domain, Scalar};
