//! Algebraic space-time lattice codes.
//!
//! Weight-matrix constructions from cyclic division algebras, lattice invariants,
//! Hurwitz-Radon / R-matrix fast-decodability analysis and ML decoding over a
//! simulated Rayleigh fading channel.

pub mod cda;
pub mod cli;
pub mod codebook;
pub mod error;
pub mod fd;
pub mod field;
pub mod lattice;
pub mod linalg;
pub mod sim;

pub use error::{Error, Result};
pub use lattice::{CMat, WeightBasis, C64};
