//! Deciding and constructing group structures that turn a given bijection
//! into a group automorphism.
//!
//! Finite targets are the cyclic groups `Z_n` and `Z_p x Z_p`; the infinite
//! target is `Z^n`, realized by unimodular integer matrices.

pub mod cli;
pub mod error;
pub mod finite;
pub mod intmat;
pub mod numtheory;
pub mod poly;
pub mod structures;
pub mod zn;

pub use error::{Error, Result};
pub use intmat::IntMatrix;
pub use poly::IntPolynomial;
pub use structures::{CycleStructure, Permutation, ZStructureDescriptor};
