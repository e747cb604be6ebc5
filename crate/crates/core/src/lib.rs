//! Number fields, heights, Hecke operators and lattice point counting for
//! checking adelic mean value formulas at desk scale.
//!
//! The crate is organised bottom-up: [`numberfield`] supplies exact field
//! arithmetic, [`lattices`] realises modules as Euclidean lattices, and the
//! remaining modules build the verification engines on top.

// index loops mirror the matrix formulas; !(x > y) also rejects NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod heights;
pub mod hecke;
pub mod intmat;
pub mod lattices;
pub mod meanvalue;
pub mod numberfield;
pub mod ratmat;
pub mod schanuel;
pub mod special;

pub use error::{Error, Result};
pub use numberfield::{FieldElement, NumberField, PrimeIdeal, SplittingType};
pub use lattices::{EmbeddedLattice, Region};
