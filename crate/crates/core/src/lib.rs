//! Matrix-valued discrete exterior calculus on cubical lattices, with the
//! discrete Bogomolny and self-dual Yang-Mills systems built on top of it.

pub mod calculus;
pub mod chain;
pub mod cochain;
pub mod config;
pub mod error;
pub mod gauge;
pub mod lattice;
pub mod matrix;
pub mod random;
pub mod report;
pub mod solver;
pub mod verify;

pub use chain::{pairing, BasisElement, Chain};
pub use cochain::Cochain;
pub use error::{Error, Result};
pub use gauge::{Connection, Curvature, HiggsField};
pub use lattice::{Boundary, EdgeSet, Lattice, MultiIndex};
pub use matrix::{Matrix2C, Su2Vector};
