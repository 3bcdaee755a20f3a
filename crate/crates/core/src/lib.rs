//! Exact computations on genera of even lattices and on the maximal lattices of
//! vertex algebras built from them.

pub mod arith;
pub mod cocycle;
pub mod error;
pub mod lattice;
pub mod genus;
pub mod genus_enum;
pub mod gradedchar;
pub mod isom;
pub mod lie;
pub mod mass;
pub mod neighbor;
pub mod shortvec;
pub mod voa;

pub use error::{Error, Result};
pub use lattice::{IntLattice, RationalSpan};
