//! Combinatorial and lattice-theoretic layer of Coulomb branch gluing for
//! quiver gauge theories.

pub mod constructions;
pub mod error;
pub mod euler;
pub mod gaugerep;
pub mod gluability;
pub mod lattice;
pub mod problem;
pub mod quiver;

pub use error::{Error, Result};
