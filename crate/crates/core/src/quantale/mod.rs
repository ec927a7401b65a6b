//! Finite lattices and quantales.

mod lattice;
#[allow(clippy::module_inception)]
mod quantale;

pub use lattice::{Elem, Lattice, LatticeError, Relation};
pub use quantale::{Quantale, QuantaleError, Side, SupportTest};
